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

// Analytical decoding/detection probabilities of the typical cell.
//
// Notation: R0 is the tBS-tUE distance, rho the distance from the tBS to its
// nearest interfering BS, R1 the fixed tBS-target distance. rho and R0 are
// averaged as independent variables, rho outer, R0 inner.
//
// The four BS-side probabilities are integrated together as one
// vector-valued integrand, so the dominance relations between them hold
// exactly in floating point, not just up to quadrature error.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fdisac/interference.hpp"
#include "fdisac/params.hpp"
#include "fdisac/quad.hpp"

namespace fdisac::analysis {

enum class SuicOrder { DecodeFirst, DetectFirst };

inline const char* to_string(SuicOrder order) {
  return order == SuicOrder::DecodeFirst ? "decode-first" : "detect-first";
}

struct ProbabilityEstimate {
  double value = 0.0;
  double error = 0.0;  // quadrature error estimate (absolute)

  ProbabilityEstimate clamped() const { return {std::clamp(value, 0.0, 1.0), error}; }
};

struct AnalysisReport {
  SuicOrder order = SuicOrder::DecodeFirst;
  ProbabilityEstimate p_decode_ue;
  ProbabilityEstimate p_stage1;
  ProbabilityEstimate p_stage2_given;
  ProbabilityEstimate p_stage2_joint;  // p_stage1 * p_stage2_given
};

/// The four BS-side probabilities from one nested integration.
struct BsProbabilities {
  ProbabilityEstimate decode_first;         // uplink decoded 1st, echo interferes
  ProbabilityEstimate detect_second_given;  // echo detected after uplink removed
  ProbabilityEstimate detect_first;         // echo detected 1st, uplink interferes
  ProbabilityEstimate decode_second_given;  // uplink decoded after echo removed
};

class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AnalysisOptions {
  quad::QuadOptions outer{1e-9, 1e-11, 4000};
  quad::QuadOptions inner{1e-11, 1e-13, 4000};
};

/// Evaluation engine bound to one set of point-process constants.
class Engine {
 public:
  explicit Engine(const NetworkParams& params, AnalysisOptions opts = {})
      : ctx_(interference::LtContext::from(params)), opts_(opts) {}

  const interference::LtContext& context() const { return ctx_; }

  /// Downlink decoding at the tUE.
  ProbabilityEstimate p_decode_ue(const Scenario& sc) const {
    check(sc);
    const auto& p = sc.params;
    using interference::Field;
    using interference::Receiver;
    auto kernel = [&](double r0) {
      const double path = std::pow(r0, p.eta);
      const double s = sc.theta_b * path;
      double log_value = -s * (p.sigma2 + p.p_u * p.zeta) / p.p_b;
      if (sc.intercell) {
        log_value += interference::log_lt_for_receiver(Receiver::TypicalUe, Field::Bs, s, r0, ctx_);
        log_value += interference::log_lt_for_receiver(Receiver::TypicalUe, Field::Ue, s * p.p_u / p.p_b, r0, ctx_);
      }
      return std::exp(log_value);
    };
    const auto r = quad::expect_r0(kernel, p, fading_constants(), opts_.outer);
    require(r.converged(), "p_decode_ue");
    return {r.value, r.est_error};
  }

  BsProbabilities bs_probabilities(const Scenario& sc) const {
    check(sc);
    const auto& p = sc.params;
    const auto& fc = fading_constants();
    using interference::log_lt_conditioned;
    using interference::log_lt_unconditioned;

    const double r1_double = std::pow(sc.r1, 2.0 * p.eta);  // double path loss R1^{2 eta}
    const double radar_s = fc.eps_r * sc.theta_b * r1_double;

    // Components: [decode 1st, decode 2nd given, detect 2nd miss, detect 1st miss]
    using Vec = std::array<double, 4>;
    auto inner_kernel = [&](double rho, double r0) -> Vec {
      const double path = std::pow(r0, p.eta);

      // uplink: s = theta_u R0^eta / P_u, BS field scaled by P_b, UE field by P_u
      const double su = sc.theta_u * path / p.p_u;
      double log_uplink = -su * (p.sigma2 + p.p_b * p.zeta);
      if (sc.intercell) {
        log_uplink += log_lt_conditioned(su * p.p_b, rho, ctx_);
        log_uplink += log_lt_unconditioned(su * p.p_u, rho / 2.0, ctx_);
      }
      const double decode2 = std::exp(log_uplink);
      const double decode1 = decode2 * interference::lt_h1_squared(su * p.p_b / r1_double);

      // radar: s = eps_r theta_b R1^{2 eta} / P_b
      double log_radar = -radar_s * (p.p_b * p.zeta + p.sigma2) / p.p_b;
      if (sc.intercell) {
        log_radar += log_lt_conditioned(radar_s, rho, ctx_);
        log_radar += log_lt_unconditioned(radar_s * p.p_u / p.p_b, rho / 2.0, ctx_);
      }
      const double miss2 = std::pow(-std::expm1(log_radar), fc.m_r);
      // intracell uplink seen by the detector: 1/(1 + eps theta_b P_u R1^{2eta} / (P_b R0^eta))
      const double log_intracell = -std::log1p(radar_s * p.p_u / (p.p_b * path));
      const double miss1 = std::pow(-std::expm1(log_radar + log_intracell), fc.m_r);
      return {decode1, decode2, miss2, miss1};
    };

    auto over_r0 = [&](double rho) -> Vec {
      const auto r = quad::expect_r0([&](double r0) { return inner_kernel(rho, r0); }, p, fc, opts_.inner);
      require(r.converged(), "bs_probabilities (R0)");
      return r.value;
    };

    quad::QuadResult<Vec> total;
    if (sc.intercell) {
      total = quad::expect_rho(over_r0, p, opts_.outer);
      require(total.converged(), "bs_probabilities (rho)");
    } else {
      total.value = over_r0(std::numeric_limits<double>::infinity());
    }
    const double err = total.est_error;
    return {{total.value[0], err}, {1.0 - total.value[2], err}, {1.0 - total.value[3], err}, {total.value[1], err}};
  }

  ProbabilityEstimate p_decode_bs_first(const Scenario& sc) const { return bs_probabilities(sc).decode_first; }
  ProbabilityEstimate p_detect_bs_second_given(const Scenario& sc) const {
    return bs_probabilities(sc).detect_second_given;
  }
  ProbabilityEstimate p_detect_bs_first(const Scenario& sc) const { return bs_probabilities(sc).detect_first; }
  ProbabilityEstimate p_decode_bs_second_given(const Scenario& sc) const {
    return bs_probabilities(sc).decode_second_given;
  }

  AnalysisReport evaluate_order(const Scenario& sc, SuicOrder order) const {
    return report(sc, order, bs_probabilities(sc), p_decode_ue(sc));
  }

  static AnalysisReport report(const Scenario&, SuicOrder order, const BsProbabilities& bs,
                               const ProbabilityEstimate& decode_ue) {
    AnalysisReport rep;
    rep.order = order;
    rep.p_decode_ue = decode_ue.clamped();
    if (order == SuicOrder::DecodeFirst) {
      rep.p_stage1 = bs.decode_first.clamped();
      rep.p_stage2_given = bs.detect_second_given.clamped();
    } else {
      rep.p_stage1 = bs.detect_first.clamped();
      rep.p_stage2_given = bs.decode_second_given.clamped();
    }
    rep.p_stage2_joint = {rep.p_stage1.value * rep.p_stage2_given.value,
                          rep.p_stage1.error + rep.p_stage2_given.error};
    return rep;
  }

  /// detect 1st minus joint detect 2nd (= decode 1st * detect 2nd given).
  double detection_order_gap(const Scenario& sc) const {
    const auto bs = bs_probabilities(sc);
    return bs.detect_first.value - bs.decode_first.value * bs.detect_second_given.value;
  }

 private:
  static void check(const Scenario& sc) { require_valid(sc); }

  static void require(bool ok, const char* what) {
    if (!ok) throw AnalysisError(std::string(what) + ": quadrature did not converge");
  }

  interference::LtContext ctx_;
  AnalysisOptions opts_;
};

// Free-function surface; each call builds a context (the repulsion table is cached).

inline ProbabilityEstimate p_decode_ue(const Scenario& sc) { return Engine(sc.params).p_decode_ue(sc); }
inline ProbabilityEstimate p_decode_bs_first(const Scenario& sc) { return Engine(sc.params).p_decode_bs_first(sc); }
inline ProbabilityEstimate p_detect_bs_second_given(const Scenario& sc) {
  return Engine(sc.params).p_detect_bs_second_given(sc);
}
inline ProbabilityEstimate p_detect_bs_first(const Scenario& sc) { return Engine(sc.params).p_detect_bs_first(sc); }
inline ProbabilityEstimate p_decode_bs_second_given(const Scenario& sc) {
  return Engine(sc.params).p_decode_bs_second_given(sc);
}
inline AnalysisReport evaluate_order(const Scenario& sc, SuicOrder order) {
  return Engine(sc.params).evaluate_order(sc, order);
}

enum class CrossoverVariable { R1, Pu };

inline Scenario with_variable(Scenario sc, CrossoverVariable var, double value) {
  if (var == CrossoverVariable::R1) sc.r1 = value;
  else sc.params.p_u = value;
  return sc;
}

struct CrossoverOptions {
  int scan_points = 24;      // coarse grid used to bracket sign changes
  double rel_tol = 1e-3;
  bool log_spacing = false;
};

/// Root of detect-1st minus joint detect-2nd over [lo, hi]. The range is first
/// scanned on a grid; the first bracketed sign change is refined by bisection.
/// Returns nothing when the gap keeps one sign over the whole grid.
inline std::optional<double> find_crossover(const Scenario& base, CrossoverVariable var, double lo, double hi,
                                            CrossoverOptions opts = {}) {
  if (!(lo < hi) || opts.scan_points < 2) throw std::invalid_argument("find_crossover: need lo < hi and >= 2 points");
  auto gap = [&](double x) {
    const Scenario sc = with_variable(base, var, x);
    return Engine(sc.params).detection_order_gap(sc);
  };
  auto grid = [&](int i) {
    const double t = static_cast<double>(i) / (opts.scan_points - 1);
    return opts.log_spacing ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t;
  };

  double a = grid(0);
  double ga = gap(a);
  if (ga == 0.0) return a;
  for (int i = 1; i < opts.scan_points; ++i) {
    double b = grid(i);
    double gb = gap(b);
    if (gb == 0.0) return b;
    if ((ga > 0.0) != (gb > 0.0)) {
      while (b - a > opts.rel_tol * 0.5 * std::abs(a + b)) {
        const double mid = 0.5 * (a + b);
        const double gm = gap(mid);
        if (gm == 0.0) return mid;
        if ((gm > 0.0) == (ga > 0.0)) {
          a = mid;
          ga = gm;
        } else {
          b = mid;
        }
      }
      return 0.5 * (a + b);
    }
    a = b;
    ga = gb;
  }
  return std::nullopt;
}

}  // namespace fdisac::analysis
