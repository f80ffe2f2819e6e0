/*
   Copyright 2026 The fdisac Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

// Counter-based random streams (Philox4x32-10, Salmon et al. SC'11).
// A stream is keyed by (seed, stream index, substream); draws are a pure
// function of those and the draw index, so parallel schedules cannot change
// them. Counter layout: {block, substream, index lo, index hi}.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace fdisac::rng {

using Philox4x32Block = std::array<std::uint32_t, 4>;
using Philox4x32Key = std::array<std::uint32_t, 2>;

inline Philox4x32Block philox4x32_10(Philox4x32Block ctr, Philox4x32Key key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kW0;
      key[1] += kW1;
    }
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

/// Sequential view of one Philox stream. Satisfies UniformRandomBitGenerator.
class Stream {
 public:
  using result_type = std::uint32_t;

  /// `substream` splits one stream into independent sequences of up to 2^32 blocks.
  Stream(std::uint64_t seed, std::uint64_t stream_index, std::uint32_t substream = 0)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_{static_cast<std::uint32_t>(stream_index), static_cast<std::uint32_t>(stream_index >> 32)},
        substream_(substream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (used_ == 4) refill();
    return buffer_[used_++];
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() {
    const std::uint64_t a = (*this)() >> 5;
    const std::uint64_t b = (*this)() >> 6;
    return (static_cast<double>(a) * 67108864.0 + static_cast<double>(b)) * (1.0 / 9007199254740992.0);
  }

  /// Uniform on (0, 1].
  double uniform_pos() { return 1.0 - uniform(); }

  /// Unit-mean exponential.
  double exponential() { return -std::log(uniform_pos()); }

  std::uint32_t blocks_used() const { return block_; }

 private:
  void refill() {
    buffer_ = philox4x32_10({block_, substream_, stream_[0], stream_[1]}, key_);
    ++block_;
    used_ = 0;
  }

  Philox4x32Key key_;
  std::array<std::uint32_t, 2> stream_;
  std::uint32_t substream_;
  std::uint32_t block_ = 0;
  Philox4x32Block buffer_{};
  int used_ = 4;
};

}  // namespace fdisac::rng
