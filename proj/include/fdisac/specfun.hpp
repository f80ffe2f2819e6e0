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

// Special functions used by the closed-form probability expressions:
//   - 2F1(1, 1-delta; 2-delta; z) for z <= 0
//   - erfcx(x) = exp(x^2) erfc(x)
//   - digamma and the harmonic number at real argument

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fdisac::specfun {

struct SpecFunResult {
  double value = 0.0;
  double est_error = 0.0;  // bound on absolute error
};

inline constexpr double kEulerGamma = 0.57721566490153286061;

namespace detail {

inline constexpr int kMaxSeriesTerms = 2000;
inline constexpr double kSeriesEps = 1e-17;

[[noreturn]] inline void not_converged(const char* what) {
  throw std::runtime_error(std::string(what) + ": series did not converge");
}

// sum_{n>=0} x^n / (n + c) for |x| <= 1/2, c > 0
inline SpecFunResult lerch_series(double x, double c) {
  double power = 1.0;
  double sum = 0.0;
  for (int n = 0; n < kMaxSeriesTerms; ++n) {
    const double term = power / (n + c);
    sum += term;
    if (std::abs(term) <= kSeriesEps * std::abs(sum)) {
      // alternating or geometric with ratio <= 1/2: tail <= |term|
      return {sum, std::abs(term) + 4.0 * std::numeric_limits<double>::epsilon() * std::abs(sum)};
    }
    power *= x;
  }
  not_converged("lerch_series");
}

}  // namespace detail

/// Gauss hypergeometric 2F1(1, 1-delta; 2-delta; z) for z <= 0, 0 < delta < 1.
///
/// Three regimes keep every series at ratio <= 2/3:
///   z in [-1/2, 0]: defining series, (1-delta) * sum z^n / (n + 1 - delta)
///   z in (-2, -1/2): Pfaff transform to w = z/(z-1) in (1/3, 2/3)
///   z <= -2: the 1/z connection formula (delta is never an integer here)
inline SpecFunResult hyp2f1_interference_checked(double z, double delta) {
  if (!(z <= 0.0)) throw std::domain_error("hyp2f1_interference: z must be <= 0");
  if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("hyp2f1_interference: delta must lie in (0,1)");
  if (z == 0.0) return {1.0, 0.0};
  const double b = 1.0 - delta;
  constexpr double eps = std::numeric_limits<double>::epsilon();

  if (z >= -0.5) {
    const auto s = detail::lerch_series(z, b);
    return {b * s.value, b * s.est_error};
  }

  if (z > -2.0) {
    // 2F1(1,b;c;z) = (1-z)^{-1} 2F1(1, c-b; c; z/(z-1)), here c-b = 1
    const double w = z / (z - 1.0);
    const double c = 2.0 - delta;
    double term = 1.0;
    double sum = 1.0;
    for (int n = 0; n < detail::kMaxSeriesTerms; ++n) {
      term *= w * (n + 1.0) / (n + c);
      sum += term;
      if (term <= detail::kSeriesEps * sum) {
        const double tail = term * w / (1.0 - w);
        const double scale = 1.0 / (1.0 - z);
        return {sum * scale, (tail + 8.0 * eps * sum) * scale};
      }
    }
    detail::not_converged("hyp2f1_interference (Pfaff)");
  }

  const double x = 1.0 / z;
  const double reflected = std::numbers::pi / std::sin(std::numbers::pi * delta) * std::pow(-z, delta - 1.0);
  const auto s = detail::lerch_series(x, delta);
  const double value = b * (reflected + x * s.value);
  const double err = b * (std::abs(x) * s.est_error + 8.0 * eps * (std::abs(reflected) + std::abs(x * s.value)));
  return {value, err};
}

inline double hyp2f1_interference(double z, double delta) {
  return hyp2f1_interference_checked(z, delta).value;
}

/// Scaled complementary error function exp(x^2) * erfc(x).
///
/// Below x = 2 the product is formed directly; above, the Laplace continued
/// fraction erfcx(x) = 1/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
/// is evaluated with the modified Lentz method.
inline double erfcx(double x) {
  if (std::isnan(x)) return x;
  if (x < 2.0) return std::exp(x * x) * std::erfc(x);
  if (std::isinf(x)) return 0.0;
  // Beyond 1e8 the next asymptotic term is below 5e-17 relative.
  if (x > 1e8) return std::numbers::inv_sqrtpi / x;

  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  double f = x;
  double c = x;
  double d = 0.0;
  for (int k = 1; k < 10000; ++k) {
    const double a = 0.5 * k;
    d = x + a * d;
    if (d == 0.0) d = tiny;
    c = x + a / c;
    if (c == 0.0) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < eps) return std::numbers::inv_sqrtpi / f;
  }
  detail::not_converged("erfcx");
}

/// Digamma function for x > 0: upward recurrence to x >= 10, then the
/// asymptotic expansion through the x^-14 term.
inline double digamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("digamma: argument must be positive");
  double shift = 0.0;
  while (x < 10.0) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // -sum_{k=1}^{7} B_{2k} / (2k x^{2k}), Horner in 1/x^2
  const double series =
      inv2 * (-1.0 / 12.0 +
              inv2 * (1.0 / 120.0 +
                      inv2 * (-1.0 / 252.0 +
                              inv2 * (1.0 / 240.0 +
                                      inv2 * (-1.0 / 132.0 + inv2 * (691.0 / 32760.0 + inv2 * (-1.0 / 12.0)))))));
  return shift + std::log(x) - 0.5 * inv + series;
}

/// Harmonic number continued to real x > 0: H(x) = digamma(x + 1) + gamma.
inline double harmonic_generalized(double x) {
  if (!(x > 0.0)) throw std::domain_error("harmonic_generalized: argument must be positive");
  return digamma(x + 1.0) + kEulerGamma;
}

}  // namespace fdisac::specfun
