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

// Laplace transforms of Rayleigh-faded intercell interference with unit
// transmit power, and the fading laws of the radar echo.
//
// Every transform takes a power-scaled argument: the caller folds the
// transmit power of the interfering field into s.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "fdisac/params.hpp"
#include "fdisac/quad.hpp"
#include "fdisac/specfun.hpp"

namespace fdisac::interference {

class RepulsionTable;

/// Point-process constants shared by all transforms.
struct LtContext {
  double lambda = 1e-5;
  double eta = 4.0;
  double delta = 0.5;
  std::shared_ptr<const RepulsionTable> repulsion;  // null: evaluate by direct quadrature

  static LtContext from(const NetworkParams& p, bool with_table = true);
};

enum class GuardKind { Unconditioned, Conditioned, Repulsion };

struct GuardSpec {
  double psi = 0.0;  // guard-zone radius; unused for Repulsion
  GuardKind kind = GuardKind::Unconditioned;
};

namespace detail {

inline void check_s(double s) {
  if (!(s >= 0.0)) throw std::domain_error("Laplace argument must be non-negative");
}

inline void check_psi(double psi) {
  if (!(psi >= 0.0)) throw std::domain_error("guard radius must be non-negative");
}

}  // namespace detail

/// log of the transform for a homogeneous PPP outside a guard disk of radius
/// psi, no interferer at the boundary. Always goes through 2F1.
inline double log_lt_unconditioned_general(double s, double psi, const LtContext& ctx) {
  detail::check_s(s);
  detail::check_psi(psi);
  if (s == 0.0 || ctx.lambda == 0.0 || std::isinf(psi)) return 0.0;
  if (std::isinf(s)) return -std::numeric_limits<double>::infinity();
  const double pi = std::numbers::pi;
  if (psi == 0.0) {
    // no guard zone: -pi lambda s^delta * pi delta / sin(pi delta)
    return -pi * ctx.lambda * std::pow(s, ctx.delta) * pi * ctx.delta / std::sin(pi * ctx.delta);
  }
  const double z = -s / std::pow(psi, ctx.eta);
  const double f = specfun::hyp2f1_interference(z, ctx.delta);
  return -2.0 * pi * ctx.lambda * s / ((ctx.eta - 2.0) * std::pow(psi, ctx.eta - 2.0)) * f;
}

/// As above, with the arctan closed form when eta = 4.
inline double log_lt_unconditioned(double s, double psi, const LtContext& ctx) {
  if (ctx.eta != 4.0) return log_lt_unconditioned_general(s, psi, ctx);
  detail::check_s(s);
  detail::check_psi(psi);
  if (s == 0.0 || ctx.lambda == 0.0 || std::isinf(psi)) return 0.0;
  if (std::isinf(s)) return -std::numeric_limits<double>::infinity();
  const double root = std::sqrt(s);
  const double angle = psi == 0.0 ? std::numbers::pi / 2.0 : std::atan(root / (psi * psi));
  return -std::numbers::pi * ctx.lambda * root * angle;
}

inline double lt_unconditioned(double s, double psi, const LtContext& ctx) {
  return std::exp(log_lt_unconditioned(s, psi, ctx));
}

inline double lt_unconditioned_general(double s, double psi, const LtContext& ctx) {
  return std::exp(log_lt_unconditioned_general(s, psi, ctx));
}

namespace detail {

// log 1/(1 + s psi^-eta): the guaranteed interferer at the guard boundary.
inline double log_boundary_interferer(double s, double psi, double eta) {
  if (s == 0.0 || std::isinf(psi)) return 0.0;
  if (psi == 0.0 || std::isinf(s)) return -std::numeric_limits<double>::infinity();
  return -std::log1p(s * std::pow(psi, -eta));
}

}  // namespace detail

/// Guard disk of radius psi with one interferer guaranteed on its boundary.
inline double log_lt_conditioned(double s, double psi, const LtContext& ctx) {
  const double base = log_lt_unconditioned(s, psi, ctx);
  return base + detail::log_boundary_interferer(s, psi, ctx.eta);
}

inline double lt_conditioned(double s, double psi, const LtContext& ctx) {
  return std::exp(log_lt_conditioned(s, psi, ctx));
}

inline double lt_conditioned_general(double s, double psi, const LtContext& ctx) {
  return std::exp(log_lt_unconditioned_general(s, psi, ctx) + detail::log_boundary_interferer(s, psi, ctx.eta));
}

/// Shape integral of the soft-core UE field,
///   G(a) = int_0^inf t/(1 + t^eta) * (1 - exp(-a t)) dt,
/// so that int_0^inf s r^{1-eta}/(1 + s r^-eta) (1 - exp(-3 sqrt(lambda) r)) dr
///   = s^delta * G(3 sqrt(lambda) s^(1/eta)).
inline double repulsion_shape_direct(double a, double eta) {
  if (a == 0.0) return 0.0;
  if (std::isinf(a)) return std::numbers::pi / (eta * std::sin(2.0 * std::numbers::pi / eta));
  // t = e^y; split at t = 1 so each half decays exponentially in |y|.
  auto upper = [a, eta](double y) {  // t >= 1
    const double t = std::exp(y);
    return std::pow(t, 2.0 - eta) / (1.0 + std::pow(t, -eta)) * -std::expm1(-a * t);
  };
  auto lower = [a, eta](double y) {  // t <= 1
    const double t = std::exp(-y);
    return t * t / (1.0 + std::pow(t, eta)) * -std::expm1(-a * t);
  };
  const quad::QuadOptions opts{1e-12, 1e-300, 20000};
  return quad::integrate_semi_infinite(upper, opts).value + quad::integrate_semi_infinite(lower, opts).value;
}

/// Cubic-spline table of log G over log a, for one path-loss exponent.
/// Immutable after construction.
class RepulsionTable {
 public:
  static constexpr double kLogAMin = -6.0 * std::numbers::ln10;
  static constexpr double kLogAMax = 6.0 * std::numbers::ln10;
  static constexpr int kNodes = 721;  // 60 per decade

  explicit RepulsionTable(double eta) : eta_(eta), log_g_(kNodes), second_(kNodes, 0.0) {
    step_ = (kLogAMax - kLogAMin) / (kNodes - 1);
    for (int i = 0; i < kNodes; ++i) {
      log_g_[i] = std::log(repulsion_shape_direct(std::exp(kLogAMin + i * step_), eta));
    }
    // natural spline, uniform knots
    std::vector<double> c(kNodes, 0.0), d(kNodes, 0.0);
    for (int i = 1; i < kNodes - 1; ++i) {
      const double rhs = 6.0 * (log_g_[i + 1] - 2.0 * log_g_[i] + log_g_[i - 1]) / (step_ * step_);
      const double denom = 4.0 - c[i - 1];
      c[i] = 1.0 / denom;
      d[i] = (rhs - d[i - 1]) / denom;
    }
    for (int i = kNodes - 2; i >= 1; --i) second_[i] = d[i] - c[i] * second_[i + 1];
  }

  double eta() const { return eta_; }

  /// G(a); falls back to direct quadrature outside the tabulated range.
  double shape(double a) const {
    if (!(a > 0.0)) return repulsion_shape_direct(a, eta_);
    const double x = std::log(a);
    if (x < kLogAMin || x > kLogAMax) return repulsion_shape_direct(a, eta_);
    const double pos = (x - kLogAMin) / step_;
    const int i = std::min(static_cast<int>(pos), kNodes - 2);
    const double t = pos - i;
    const double u = 1.0 - t;
    const double h2 = step_ * step_ / 6.0;
    const double value = u * log_g_[i] + t * log_g_[i + 1] +
                         h2 * ((u * u * u - u) * second_[i] + (t * t * t - t) * second_[i + 1]);
    return std::exp(value);
  }

  static std::shared_ptr<const RepulsionTable> cached(double eta) {
    static std::mutex mutex;
    static std::map<double, std::shared_ptr<const RepulsionTable>> tables;
    std::lock_guard lock(mutex);
    auto& slot = tables[eta];
    if (!slot) slot = std::make_shared<const RepulsionTable>(eta);
    return slot;
  }

 private:
  double eta_;
  double step_ = 0.0;
  std::vector<double> log_g_;
  std::vector<double> second_;
};

inline LtContext LtContext::from(const NetworkParams& p, bool with_table) {
  LtContext ctx{p.lambda, p.eta, p.delta(), nullptr};
  if (with_table) ctx.repulsion = RepulsionTable::cached(p.eta);
  return ctx;
}

/// The repulsion integral int_0^inf s r^{1-eta}/(1+s r^-eta)(1-e^{-3 sqrt(lambda) r}) dr,
/// evaluated directly in r with adaptive quadrature (no table).
inline double repulsion_integral_direct(double s, double lambda, double eta) {
  if (s == 0.0 || lambda == 0.0) return 0.0;
  const double kappa = 3.0 * std::sqrt(lambda);
  const double scale = std::pow(s, 1.0 / eta);  // kernel transition radius
  auto kernel = [s, eta, kappa](double r) {
    return s * r / (std::pow(r, eta) + s) * -std::expm1(-kappa * r);
  };
  const quad::QuadOptions opts{1e-14, 1e-300, 20000};
  return quad::integrate_semi_infinite(kernel, opts, scale).value;
}

/// log of the transform of the soft-core UE field seen from a random point
/// of the typical cell (radial intensity lambda(1 - exp(-3 sqrt(lambda) r))).
inline double log_lt_repulsion(double s, const LtContext& ctx) {
  detail::check_s(s);
  if (s == 0.0 || ctx.lambda == 0.0) return 0.0;
  if (std::isinf(s)) return -std::numeric_limits<double>::infinity();
  const double a = 3.0 * std::sqrt(ctx.lambda) * std::pow(s, 1.0 / ctx.eta);
  const double g = ctx.repulsion ? ctx.repulsion->shape(a) : repulsion_shape_direct(a, ctx.eta);
  return -2.0 * std::numbers::pi * ctx.lambda * std::pow(s, ctx.delta) * g;
}

inline double lt_repulsion(double s, const LtContext& ctx) { return std::exp(log_lt_repulsion(s, ctx)); }

/// Approximate CDF of the radar joint fading h1^2: (1 - exp(-eps_r x))^m_r.
inline double cdf_hjr(double x, const FadingConstants& fc = fading_constants()) {
  if (!(x >= 0.0)) throw std::domain_error("cdf_hjr: x must be non-negative");
  if (x == 0.0) return 0.0;
  return std::pow(-std::expm1(-fc.eps_r * x), fc.m_r);
}

/// Exact CDF of h1^2 with h1 unit exponential: 1 - exp(-sqrt(x)).
inline double cdf_hjr_exact(double x) {
  if (!(x >= 0.0)) throw std::domain_error("cdf_hjr_exact: x must be non-negative");
  return -std::expm1(-std::sqrt(x));
}

/// E[exp(-s h^2)] for h unit exponential,
///   sqrt(pi) exp(1/(4s)) erfc(1/(2 sqrt s)) / (2 sqrt s) = sqrt(pi) a erfcx(a), a = 1/(2 sqrt s).
inline double lt_h1_squared(double s) {
  detail::check_s(s);
  if (s == 0.0) return 1.0;
  if (std::isinf(s)) return 0.0;
  const double a = 0.5 / std::sqrt(s);
  return std::min(1.0, std::sqrt(std::numbers::pi) * a * specfun::erfcx(a));
}

enum class Receiver { TypicalBs, TypicalUe };
enum class Field { Bs, Ue };

/// log transform for a receiver/interferer-field pair:
///   tBS / BS field: conditioned, psi = rho
///   tBS / UE field: unconditioned, psi = rho/2
///   tUE / BS field: unconditioned, psi = R0
///   tUE / UE field: repulsion (distance unused)
/// `distance` is rho for the tBS and R0 for the tUE.
inline double log_lt_for_receiver(Receiver receiver, Field field, double s, double distance, const LtContext& ctx,
                                  bool intercell = true) {
  if (!intercell) return 0.0;
  if (receiver == Receiver::TypicalBs) {
    return field == Field::Bs ? log_lt_conditioned(s, distance, ctx) : log_lt_unconditioned(s, distance / 2.0, ctx);
  }
  return field == Field::Bs ? log_lt_unconditioned(s, distance, ctx) : log_lt_repulsion(s, ctx);
}

inline double lt_for_receiver(Receiver receiver, Field field, double s, double distance, const LtContext& ctx,
                              bool intercell = true) {
  return std::exp(log_lt_for_receiver(receiver, field, s, distance, ctx, intercell));
}

/// Dispatch on a guard specification.
inline double lt_guarded(double s, const GuardSpec& guard, const LtContext& ctx) {
  switch (guard.kind) {
    case GuardKind::Unconditioned: return lt_unconditioned(s, guard.psi, ctx);
    case GuardKind::Conditioned: return lt_conditioned(s, guard.psi, ctx);
    case GuardKind::Repulsion: return lt_repulsion(s, ctx);
  }
  return 1.0;
}

}  // namespace fdisac::interference
