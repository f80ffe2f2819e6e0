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

// Sweep, verification and crossover drivers behind the fdisac tool, plus the
// locale-independent CSV writer they share.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fdisac/analysis.hpp"
#include "fdisac/netsim.hpp"
#include "fdisac/params.hpp"

namespace fdisac::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitVerifyFailed = 3;

class SpecError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

enum class SweepVariable { ThetaDb, ThetaBDb, ThetaUDb, R1, Pu, Zeta };
enum class Engines { Analysis, Simulation, Both };
enum class OrderSelection { DecodeFirst, DetectFirst, Both };

inline SweepVariable parse_variable(std::string_view s) {
  if (s == "theta_db") return SweepVariable::ThetaDb;
  if (s == "theta_b_db") return SweepVariable::ThetaBDb;
  if (s == "theta_u_db") return SweepVariable::ThetaUDb;
  if (s == "r1") return SweepVariable::R1;
  if (s == "p_u") return SweepVariable::Pu;
  if (s == "zeta") return SweepVariable::Zeta;
  throw SpecError("unknown sweep variable '" + std::string(s) + "'");
}

inline const char* to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::ThetaDb: return "theta_db";
    case SweepVariable::ThetaBDb: return "theta_b_db";
    case SweepVariable::ThetaUDb: return "theta_u_db";
    case SweepVariable::R1: return "r1";
    case SweepVariable::Pu: return "p_u";
    case SweepVariable::Zeta: return "zeta";
  }
  return "?";
}

inline Engines parse_engines(std::string_view s) {
  if (s == "analysis") return Engines::Analysis;
  if (s == "sim") return Engines::Simulation;
  if (s == "both") return Engines::Both;
  throw SpecError("unknown engine '" + std::string(s) + "' (expected analysis, sim or both)");
}

inline OrderSelection parse_order(std::string_view s) {
  if (s == "decode-first") return OrderSelection::DecodeFirst;
  if (s == "detect-first") return OrderSelection::DetectFirst;
  if (s == "both") return OrderSelection::Both;
  throw SpecError("unknown order '" + std::string(s) + "' (expected decode-first, detect-first or both)");
}

struct SweepSpec {
  SweepVariable variable = SweepVariable::ThetaDb;
  double start = -60.0;
  double stop = 0.0;
  int points = 13;
  bool log_spacing = false;
  bool r1_in_v = true;  // r1 sweep values are multiples of v
  Engines engines = Engines::Both;
  OrderSelection order = OrderSelection::Both;

  void validate() const {
    if (!(start < stop)) throw SpecError("sweep: start must be < stop");
    if (points < 2) throw SpecError("sweep: need at least 2 points");
    if (log_spacing && !(start > 0.0)) throw SpecError("sweep: log spacing needs positive endpoints");
  }

  std::vector<double> values() const {
    validate();
    std::vector<double> out(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
      const double t = static_cast<double>(i) / (points - 1);
      out[i] = log_spacing ? start * std::pow(stop / start, t) : start + (stop - start) * t;
    }
    out.back() = stop;
    return out;
  }
};

/// Applies one sweep value to a scenario.
inline Scenario apply(Scenario sc, const SweepSpec& spec, double x) {
  switch (spec.variable) {
    case SweepVariable::ThetaDb: sc.theta_b = sc.theta_u = db_to_linear(x); break;
    case SweepVariable::ThetaBDb: sc.theta_b = db_to_linear(x); break;
    case SweepVariable::ThetaUDb: sc.theta_u = db_to_linear(x); break;
    case SweepVariable::R1: sc.r1 = spec.r1_in_v ? x * sc.params.distance_unit() : x; break;
    case SweepVariable::Pu: sc.params.p_u = x; break;
    case SweepVariable::Zeta: sc.params.zeta = x; break;
  }
  return sc;
}

inline constexpr std::size_t kQuantityCount = 5;
inline constexpr std::array<const char*, kQuantityCount> kQuantities = {
    "decode_ue", "decode_bs_1st", "detect_bs_2nd_joint", "detect_bs_1st", "decode_bs_2nd_joint"};

inline constexpr std::array<netsim::Event, kQuantityCount> kQuantityEvents = {
    netsim::Event::DecodeUe, netsim::Event::DecodeBsFirst, netsim::Event::DetectBsSecondJoint,
    netsim::Event::DetectBsFirst, netsim::Event::DecodeBsSecondJoint};

/// Whether quantity q belongs to the selected order(s). decode_ue always does.
inline bool quantity_enabled(std::size_t q, OrderSelection order) {
  if (q == 0 || order == OrderSelection::Both) return true;
  const bool decode_first = (q == 1 || q == 2);
  return decode_first == (order == OrderSelection::DecodeFirst);
}

struct SweepRow {
  double x = 0.0;
  std::array<std::optional<double>, kQuantityCount> analytic{};
  std::array<std::optional<double>, kQuantityCount> mc{};
  std::array<std::optional<double>, kQuantityCount> mc_stderr{};
};

/// The five reported analytic quantities of one scenario, clamped to [0, 1].
inline std::array<double, kQuantityCount> analytic_quantities(const Scenario& sc) {
  const analysis::Engine engine(sc.params);
  const auto bs = engine.bs_probabilities(sc);
  const auto ue = engine.p_decode_ue(sc).clamped();
  const auto df = analysis::Engine::report(sc, analysis::SuicOrder::DecodeFirst, bs, ue);
  const auto tf = analysis::Engine::report(sc, analysis::SuicOrder::DetectFirst, bs, ue);
  return {ue.value, df.p_stage1.value, df.p_stage2_joint.value, tf.p_stage1.value, tf.p_stage2_joint.value};
}

inline std::vector<SweepRow> run_sweep(const Scenario& base, const SweepSpec& spec, const netsim::SimOptions& sim) {
  const auto xs = spec.values();
  std::vector<Scenario> scenarios;
  scenarios.reserve(xs.size());
  for (double x : xs) {
    scenarios.push_back(apply(base, spec, x));
    require_valid(scenarios.back());
  }

  std::vector<SweepRow> rows(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) rows[i].x = xs[i];

  if (spec.engines != Engines::Simulation) {
    const unsigned workers = sim.workers ? sim.workers : netsim::default_workers();
    netsim::parallel_for(xs.size(), workers, [&](unsigned, std::uint64_t i) {
      const auto a = analytic_quantities(scenarios[i]);
      for (std::size_t q = 0; q < kQuantityCount; ++q) {
        if (quantity_enabled(q, spec.order)) rows[i].analytic[q] = a[q];
      }
    });
  }
  if (spec.engines != Engines::Analysis) {
    const auto est = netsim::estimate_many(scenarios, sim);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      for (std::size_t q = 0; q < kQuantityCount; ++q) {
        if (!quantity_enabled(q, spec.order)) continue;
        rows[i].mc[q] = est[i][kQuantityEvents[q]].value;
        rows[i].mc_stderr[q] = est[i][kQuantityEvents[q]].stderr_;
      }
    }
  }
  return rows;
}

/// Shortest round-trippable form is not wanted here: 10 significant digits.
inline std::string format_number(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 10);
  return std::string(buf.data(), res.ptr);
}

inline std::string csv_header(SweepVariable v) {
  std::string h = to_string(v);
  for (const char* q : kQuantities) {
    h += ',';
    h += q;
    h += "_analysis,";
    h += q;
    h += "_mc,";
    h += q;
    h += "_mc_stderr";
  }
  return h;
}

inline void write_csv(std::ostream& out, SweepVariable v, const std::vector<SweepRow>& rows) {
  out << csv_header(v) << '\n';
  auto cell = [&](const std::optional<double>& x) {
    out << ',';
    if (x) out << format_number(*x);
  };
  for (const auto& r : rows) {
    out << format_number(r.x);
    for (std::size_t q = 0; q < kQuantityCount; ++q) {
      cell(r.analytic[q]);
      cell(r.mc[q]);
      cell(r.mc_stderr[q]);
    }
    out << '\n';
  }
}

/// Splits CSV text (no quoting) into rows of fields.
inline std::vector<std::vector<std::string>> read_csv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
      const auto comma = line.find(',', pos);
      fields.push_back(line.substr(pos, comma - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

// ---------------------------------------------------------------- verify

struct VerifyPoint {
  double theta_db = 0.0;
  std::array<double, kQuantityCount> analytic{};
  std::array<double, kQuantityCount> mc{};
  std::array<double, kQuantityCount> mc_stderr{};
};

struct VerifyReport {
  std::vector<VerifyPoint> points;
  std::array<double, kQuantityCount> max_gap{};
  std::array<double, kQuantityCount> worst_theta_db{};
  bool passed = false;
};

/// Threshold grid for the agreement check: -60..0 dB in 5 dB steps.
inline SweepSpec verify_grid() { return SweepSpec{SweepVariable::ThetaDb, -60.0, 0.0, 13, false}; }

/// Runs both engines with theta_b = theta_u over the verify grid; passes when
/// every |analytic - MC| is within the per-quantity tolerance.
inline VerifyReport verify(const Scenario& base, const std::array<double, kQuantityCount>& tolerance,
                           const netsim::SimOptions& sim) {
  const auto rows = run_sweep(base, verify_grid(), sim);
  VerifyReport rep;
  rep.passed = true;
  for (const auto& r : rows) {
    VerifyPoint pt;
    pt.theta_db = r.x;
    for (std::size_t q = 0; q < kQuantityCount; ++q) {
      pt.analytic[q] = *r.analytic[q];
      pt.mc[q] = *r.mc[q];
      pt.mc_stderr[q] = *r.mc_stderr[q];
      const double gap = std::abs(pt.analytic[q] - pt.mc[q]);
      if (gap > rep.max_gap[q] || rep.points.empty()) {
        rep.max_gap[q] = gap;
        rep.worst_theta_db[q] = r.x;
      }
      if (!(gap <= tolerance[q])) rep.passed = false;
    }
    rep.points.push_back(pt);
  }
  return rep;
}

inline VerifyReport verify(const Scenario& base, double tolerance, const netsim::SimOptions& sim) {
  std::array<double, kQuantityCount> tol;
  tol.fill(tolerance);
  return verify(base, tol, sim);
}

inline void print_verify(std::ostream& out, const VerifyReport& rep, const std::array<double, kQuantityCount>& tol) {
  out << "quantity max_abs_gap worst_theta_db tolerance status\n";
  for (std::size_t q = 0; q < kQuantityCount; ++q) {
    out << kQuantities[q] << ' ' << format_number(rep.max_gap[q]) << ' ' << format_number(rep.worst_theta_db[q])
        << ' ' << format_number(tol[q]) << ' ' << (rep.max_gap[q] <= tol[q] ? "ok" : "FAIL") << '\n';
  }
  if (rep.passed) return;
  out << "breaches:\n";
  for (const auto& pt : rep.points) {
    for (std::size_t q = 0; q < kQuantityCount; ++q) {
      const double gap = std::abs(pt.analytic[q] - pt.mc[q]);
      if (gap <= tol[q]) continue;
      out << "  theta_db=" << format_number(pt.theta_db) << ' ' << kQuantities[q]
          << " analytic=" << format_number(pt.analytic[q]) << " mc=" << format_number(pt.mc[q])
          << " stderr=" << format_number(pt.mc_stderr[q]) << " gap=" << format_number(gap) << '\n';
    }
  }
}

// ---------------------------------------------------------------- crossover

inline analysis::CrossoverVariable parse_crossover_variable(std::string_view s) {
  if (s == "r1") return analysis::CrossoverVariable::R1;
  if (s == "p_u") return analysis::CrossoverVariable::Pu;
  throw SpecError("crossover variable must be r1 or p_u, got '" + std::string(s) + "'");
}

/// Crossover of detect-1st vs joint detect-2nd. For r1, the range and the
/// result are in multiples of v.
inline std::optional<double> crossover(const Scenario& base, analysis::CrossoverVariable var, double lo, double hi,
                                       analysis::CrossoverOptions opts = {}) {
  if (!(lo < hi)) throw SpecError("crossover: start must be < stop");
  if (!(lo > 0.0)) throw SpecError("crossover: range must be positive");
  const double unit = var == analysis::CrossoverVariable::R1 ? base.params.distance_unit() : 1.0;
  const auto root = analysis::find_crossover(base, var, lo * unit, hi * unit, opts);
  if (!root) return std::nullopt;
  return *root / unit;
}

// ---------------------------------------------------------------- simulate

inline void write_raw(std::ostream& out, const std::vector<netsim::RawSample>& rows) {
  out << netsim::kRawHeader << '\n';
  for (const auto& r : rows) {
    const auto& s = r.sinr;
    out << r.rep << ',' << format_number(r.r0) << ',' << format_number(r.rho) << ',' << format_number(s.sinr_ue)
        << ',' << format_number(s.sinr_bs_decode1) << ',' << format_number(s.sinr_bs_detect2) << ','
        << format_number(s.sinr_bs_detect1) << ',' << format_number(s.sinr_bs_decode2) << ','
        << (s.decode1_then_detect2 ? 1 : 0) << ',' << (s.detect1_then_decode2 ? 1 : 0) << '\n';
  }
}

}  // namespace fdisac::cli
