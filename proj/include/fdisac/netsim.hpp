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

// Monte-Carlo simulator of the full-duplex ISAC network.
//
// Each realization places a BS at the origin plus a PPP of interfering BSs in
// a disk, puts one UE uniformly in every Voronoi cell (the tUE in the origin
// cell), and draws exact Rayleigh fading. The echo fading is h1^2 with h1 unit
// exponential. Realization i draws only from the Philox streams keyed by
// (seed, i), so estimates do not depend on how realizations are spread over
// threads.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "fdisac/geometry.hpp"
#include "fdisac/params.hpp"
#include "fdisac/rng.hpp"

namespace fdisac::netsim {

using geometry::Point;

/// Simulation window. BSs are generated in a disk of radius
/// window_radius + guard_width.
struct GeometryConfig {
  double window_radius = 0.0;
  double guard_width = 0.0;
  int window_sides = 64;  // polygon approximating the outer disk for edge cells

  /// R_win = 10/sqrt(pi lambda), guard ring 2/sqrt(pi lambda), times `scale`.
  static GeometryConfig for_density(double lambda, double scale = 1.0) {
    const double unit = 1.0 / std::sqrt(std::numbers::pi * lambda);
    return {10.0 * unit * scale, 2.0 * unit * scale, 64};
  }

  double outer_radius() const { return window_radius + guard_width; }
};

/// Fading draws for every link that enters an SINR.
struct Fading {
  double h0 = 1.0;  // tBS <-> tUE
  double h1 = 1.0;  // tBS <-> target, echo gain h1^2
  std::vector<double> bs_to_tbs;
  std::vector<double> ue_to_tbs;
  std::vector<double> bs_to_tue;
  std::vector<double> ue_to_tue;
};

struct NetworkRealization {
  std::vector<Point> bs_points;  // interfering BSs; the origin BS is implicit
  std::vector<Point> ue_points;  // ue_points[i] is served by bs_points[i]
  Point tue;
  double rho = std::numeric_limits<double>::infinity();
  double r0 = 0.0;
  Fading fading;
};

namespace detail {

// Substream layout of one realization. Points are generated in radial shells
// of width 1/sqrt(pi lambda), each with its own substream, and every BS has its
// own substream for its UE position and fading. A larger window therefore
// only adds outer shells: the inner network is identical across window sizes.
inline constexpr std::uint32_t kLinkSubstream = 0;
inline constexpr std::uint32_t kShellBits = 13;
inline constexpr std::uint32_t kSiteBits = 18;

inline std::uint32_t shell_substream(std::size_t shell) { return 1u + static_cast<std::uint32_t>(shell); }

inline std::uint32_t site_substream(std::size_t shell, std::size_t index) {
  return 0x80000000u | (static_cast<std::uint32_t>(shell) << kSiteBits) | static_cast<std::uint32_t>(index);
}

}  // namespace detail

/// One realization for (seed, rep). The draws depend only on (seed, rep).
inline NetworkRealization generate_realization(const NetworkParams& params, const GeometryConfig& geom,
                                               std::uint64_t seed, std::uint64_t rep) {
  NetworkRealization out;
  const double outer = geom.outer_radius();
  const double shell_width = 1.0 / std::sqrt(std::numbers::pi * params.lambda);
  const auto shells = outer > 0.0 ? static_cast<std::size_t>(std::ceil(outer / shell_width - 1e-12)) : 0;
  if (shells >= (std::size_t{1} << detail::kShellBits)) throw std::invalid_argument("simulation window too large");

  struct Site {
    std::size_t shell;
    std::size_t index;
  };
  std::vector<Point> sites{{0.0, 0.0}};
  std::vector<Site> ids;
  for (std::size_t k = 0; k < shells; ++k) {
    rng::Stream stream(seed, rep, detail::shell_substream(k));
    const double r_in = k * shell_width;
    const double r_out = (k + 1) * shell_width;
    const double mean = params.lambda * std::numbers::pi * (r_out * r_out - r_in * r_in);
    const int count = std::poisson_distribution<int>(mean)(stream);
    if (count >= (1 << detail::kSiteBits)) throw std::runtime_error("shell point count overflow");
    for (int j = 0; j < count; ++j) {
      const double r = std::sqrt(r_in * r_in + stream.uniform() * (r_out * r_out - r_in * r_in));
      const double a = 2.0 * std::numbers::pi * stream.uniform();
      if (r > outer) continue;  // partial last shell
      sites.push_back({r * std::cos(a), r * std::sin(a)});
      ids.push_back({k, static_cast<std::size_t>(j)});
    }
  }
  out.bs_points.assign(sites.begin() + 1, sites.end());
  for (const Point& p : out.bs_points) out.rho = std::min(out.rho, geometry::norm(p));

  const geometry::SiteGrid grid(sites, std::max(outer, 1e-9) * 1.0001, shell_width);

  rng::Stream link(seed, rep, detail::kLinkSubstream);
  const auto origin_cell = grid.cell(0, geometry::square({0.0, 0.0}, 2.0 * geom.window_radius));
  out.tue = geometry::sample_uniform(origin_cell, link);
  out.r0 = geometry::norm(out.tue);
  out.fading.h0 = link.exponential();
  out.fading.h1 = link.exponential();

  const auto window = geometry::circumscribed_ngon({0.0, 0.0}, outer, geom.window_sides);
  const std::size_t n = out.bs_points.size();
  auto& f = out.fading;
  out.ue_points.resize(n);
  f.bs_to_tbs.resize(n);
  f.ue_to_tbs.resize(n);
  f.bs_to_tue.resize(n);
  f.ue_to_tue.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    rng::Stream stream(seed, rep, detail::site_substream(ids[i].shell, ids[i].index));
    f.bs_to_tbs[i] = stream.exponential();
    f.ue_to_tbs[i] = stream.exponential();
    f.bs_to_tue[i] = stream.exponential();
    f.ue_to_tue[i] = stream.exponential();
    out.ue_points[i] = geometry::sample_uniform(grid.cell(i + 1, window), stream);
  }
  return out;
}

/// Unit-power interference sums for one path-loss exponent.
struct InterferenceSums {
  double bs_at_tbs = 0.0;
  double ue_at_tbs = 0.0;
  double bs_at_tue = 0.0;
  double ue_at_tue = 0.0;
};

namespace detail {

inline double path_gain(double d2, double eta) {
  if (eta == 4.0) return 1.0 / (d2 * d2);
  return std::pow(d2, -0.5 * eta);
}

}  // namespace detail

inline InterferenceSums interference_sums(const NetworkRealization& r, double eta) {
  InterferenceSums s;
  const auto& f = r.fading;
  for (std::size_t i = 0; i < r.bs_points.size(); ++i) {
    const Point b = r.bs_points[i];
    const Point u = r.ue_points[i];
    s.bs_at_tbs += f.bs_to_tbs[i] * detail::path_gain(geometry::norm2(b), eta);
    s.ue_at_tbs += f.ue_to_tbs[i] * detail::path_gain(geometry::norm2(u), eta);
    s.bs_at_tue += f.bs_to_tue[i] * detail::path_gain(geometry::norm2(b - r.tue), eta);
    s.ue_at_tue += f.ue_to_tue[i] * detail::path_gain(geometry::norm2(u - r.tue), eta);
  }
  return s;
}

/// The five SINRs of one realization plus the joint SuIC outcomes.
struct SinrSample {
  double sinr_ue = 0.0;           // downlink at the tUE
  double sinr_bs_decode1 = 0.0;   // uplink decoded first, echo interferes
  double sinr_bs_detect2 = 0.0;   // echo after uplink removal
  double sinr_bs_detect1 = 0.0;   // echo detected first, uplink interferes
  double sinr_bs_decode2 = 0.0;   // uplink after echo removal
  bool decode1_then_detect2 = false;
  bool detect1_then_decode2 = false;
};

inline SinrSample sample_sinrs(const NetworkRealization& r, const InterferenceSums& sums, const Scenario& sc) {
  const auto& p = sc.params;
  const InterferenceSums i = sc.intercell ? sums : InterferenceSums{};
  const double link = std::pow(r.r0, -p.eta);
  const double uplink = p.p_u * r.fading.h0 * link;
  const double echo = p.p_b * r.fading.h1 * r.fading.h1 * std::pow(sc.r1, -2.0 * p.eta);
  const double at_tbs = p.p_b * i.bs_at_tbs + p.p_u * i.ue_at_tbs + p.p_b * p.zeta + p.sigma2;
  const double at_tue = p.p_b * i.bs_at_tue + p.p_u * i.ue_at_tue + p.p_u * p.zeta + p.sigma2;

  SinrSample s;
  s.sinr_ue = p.p_b * r.fading.h0 * link / at_tue;
  s.sinr_bs_decode1 = uplink / (echo + at_tbs);
  s.sinr_bs_detect2 = echo / at_tbs;
  s.sinr_bs_detect1 = echo / (uplink + at_tbs);
  s.sinr_bs_decode2 = uplink / at_tbs;
  s.decode1_then_detect2 = s.sinr_bs_decode1 > sc.theta_u && s.sinr_bs_detect2 > sc.theta_b;
  s.detect1_then_decode2 = s.sinr_bs_detect1 > sc.theta_b && s.sinr_bs_decode2 > sc.theta_u;
  return s;
}

inline SinrSample sample_sinrs(const NetworkRealization& r, const Scenario& sc) {
  return sample_sinrs(r, interference_sums(r, sc.params.eta), sc);
}

enum class Event : std::size_t {
  DecodeUe,             // P(SINR_u > theta_b)
  DecodeBsFirst,        // P(decode-1st SINR > theta_u)
  DetectBsFirst,        // P(detect-1st SINR > theta_b)
  DetectBsSecondJoint,  // decode 1st and then detect
  DecodeBsSecondJoint,  // detect 1st and then decode
  DetectBsSecondGiven,  // P(detect-2nd SINR > theta_b), unconditional
  DecodeBsSecondGiven,  // P(decode-2nd SINR > theta_u), unconditional
};
inline constexpr std::size_t kEventCount = 7;

inline const char* to_string(Event e) {
  static constexpr std::array<const char*, kEventCount> names = {
      "decode_ue",           "decode_bs_1st",         "detect_bs_1st",         "detect_bs_2nd_joint",
      "decode_bs_2nd_joint", "detect_bs_2nd_given",   "decode_bs_2nd_given"};
  return names[static_cast<std::size_t>(e)];
}

struct McEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  std::uint64_t n = 0;

  static McEstimate from_count(std::uint64_t hits, std::uint64_t n) {
    if (n == 0) return {};
    const double p = static_cast<double>(hits) / static_cast<double>(n);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n)), n};
  }
};

struct EventEstimates {
  std::array<McEstimate, kEventCount> events{};

  const McEstimate& operator[](Event e) const { return events[static_cast<std::size_t>(e)]; }
  McEstimate& operator[](Event e) { return events[static_cast<std::size_t>(e)]; }
};

using EventCounts = std::array<std::uint64_t, kEventCount>;

inline void tally(EventCounts& c, const SinrSample& s, const Scenario& sc) {
  auto hit = [&](Event e, bool v) { c[static_cast<std::size_t>(e)] += v ? 1 : 0; };
  hit(Event::DecodeUe, s.sinr_ue > sc.theta_b);
  hit(Event::DecodeBsFirst, s.sinr_bs_decode1 > sc.theta_u);
  hit(Event::DetectBsFirst, s.sinr_bs_detect1 > sc.theta_b);
  hit(Event::DetectBsSecondJoint, s.decode1_then_detect2);
  hit(Event::DecodeBsSecondJoint, s.detect1_then_decode2);
  hit(Event::DetectBsSecondGiven, s.sinr_bs_detect2 > sc.theta_b);
  hit(Event::DecodeBsSecondGiven, s.sinr_bs_decode2 > sc.theta_u);
}

/// Worker count: FDISAC_WORKERS if set and positive, else the hardware concurrency.
inline unsigned default_workers() {
  if (const char* env = std::getenv("FDISAC_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, n) over `workers` threads in contiguous blocks.
/// body receives (worker index, realization index).
template <class Body>
void parallel_for(std::uint64_t n, unsigned workers, Body&& body) {
  workers = static_cast<unsigned>(std::clamp<std::uint64_t>(workers, 1, std::max<std::uint64_t>(n, 1)));
  if (workers == 1) {
    for (std::uint64_t i = 0; i < n; ++i) body(0u, i);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t begin = n * w / workers;
    const std::uint64_t end = n * (w + 1) / workers;
    threads.emplace_back([&body, w, begin, end] {
      for (std::uint64_t i = begin; i < end; ++i) body(w, i);
    });
  }
  for (auto& t : threads) t.join();
}

struct SimOptions {
  std::uint64_t n_reps = 10000;
  std::uint64_t seed = 20240601;
  unsigned workers = 0;         // 0: default_workers()
  double window_scale = 1.0;    // multiplies the default window
};

/// Estimates every event for each scenario from one shared set of
/// realizations. All scenarios must share lambda.
inline std::vector<EventEstimates> estimate_many(std::span<const Scenario> scenarios, const SimOptions& opts) {
  if (opts.n_reps < 1) throw std::invalid_argument("estimate: n_reps must be >= 1");
  if (scenarios.empty()) return {};
  const NetworkParams& base = scenarios.front().params;
  for (const auto& sc : scenarios) {
    require_valid(sc);
    if (sc.params.lambda != base.lambda) throw std::invalid_argument("estimate: scenarios must share lambda");
  }
  const auto geom = GeometryConfig::for_density(base.lambda, opts.window_scale);
  const unsigned workers = opts.workers ? opts.workers : default_workers();

  std::vector<std::vector<EventCounts>> counts(workers, std::vector<EventCounts>(scenarios.size(), EventCounts{}));
  parallel_for(opts.n_reps, workers, [&](unsigned w, std::uint64_t rep) {
    const auto real = generate_realization(base, geom, opts.seed, rep);
    double cached_eta = std::numeric_limits<double>::quiet_NaN();
    InterferenceSums sums;
    for (std::size_t k = 0; k < scenarios.size(); ++k) {
      const auto& sc = scenarios[k];
      if (sc.params.eta != cached_eta) {
        sums = interference_sums(real, sc.params.eta);
        cached_eta = sc.params.eta;
      }
      tally(counts[w][k], sample_sinrs(real, sums, sc), sc);
    }
  });

  std::vector<EventEstimates> out(scenarios.size());
  for (std::size_t k = 0; k < scenarios.size(); ++k) {
    for (std::size_t e = 0; e < kEventCount; ++e) {
      std::uint64_t hits = 0;
      for (unsigned w = 0; w < workers; ++w) hits += counts[w][k][e];
      out[k].events[e] = McEstimate::from_count(hits, opts.n_reps);
    }
  }
  return out;
}

inline EventEstimates estimate(const Scenario& scenario, const SimOptions& opts) {
  return estimate_many(std::span<const Scenario>(&scenario, 1), opts).front();
}

/// One row of the raw-sample dump.
struct RawSample {
  std::uint64_t rep = 0;
  double r0 = 0.0;
  double rho = 0.0;
  SinrSample sinr;
};

inline std::vector<RawSample> simulate_raw(const Scenario& sc, const SimOptions& opts) {
  require_valid(sc);
  const auto geom = GeometryConfig::for_density(sc.params.lambda, opts.window_scale);
  std::vector<RawSample> rows(opts.n_reps);
  parallel_for(opts.n_reps, opts.workers ? opts.workers : default_workers(), [&](unsigned, std::uint64_t rep) {
    const auto real = generate_realization(sc.params, geom, opts.seed, rep);
    rows[rep] = {rep, real.r0, real.rho, sample_sinrs(real, sc)};
  });
  return rows;
}

inline constexpr const char* kRawHeader =
    "rep,r0,rho,sinr_ue,sinr_bs_decode1,sinr_bs_detect2,sinr_bs_detect1,sinr_bs_decode2,"
    "decode1_then_detect2,detect1_then_decode2";

}  // namespace fdisac::netsim
