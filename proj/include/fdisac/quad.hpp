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

// Globally adaptive 15-point Gauss-Kronrod quadrature.
//
// Integrands may return a double or a std::array<double, N>. Vector-valued
// integrands share one set of nodes: when two components are ordered
// pointwise, their integrals are ordered exactly, since every weight is
// positive and floating-point rounding is monotone.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <type_traits>
#include <vector>

#include "fdisac/params.hpp"

namespace fdisac::quad {

enum class QuadStatus { Converged, NotConverged };

template <class T = double>
struct QuadResult {
  T value{};
  double est_error = 0.0;
  std::size_t evaluations = 0;
  QuadStatus status = QuadStatus::Converged;

  bool converged() const { return status == QuadStatus::Converged; }
};

struct QuadOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  std::size_t max_intervals = 4000;
};

namespace detail {

// QUADPACK qk15 abscissae and weights.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double norm_inf(double x) { return std::abs(x); }

template <std::size_t N>
double norm_inf(const std::array<double, N>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline void add_scaled(double& acc, double w, double v) { acc += w * v; }

template <std::size_t N>
void add_scaled(std::array<double, N>& acc, double w, const std::array<double, N>& v) {
  for (std::size_t i = 0; i < N; ++i) acc[i] += w * v[i];
}

inline double diff_norm(double a, double b) { return std::abs(a - b); }

template <std::size_t N>
double diff_norm(const std::array<double, N>& a, const std::array<double, N>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < N; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline bool all_finite(double x) { return std::isfinite(x); }

template <std::size_t N>
bool all_finite(const std::array<double, N>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

template <class T>
struct Interval {
  double a;
  double b;
  T value;
  double error;
};

template <class T, class F>
Interval<T> kronrod15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  T kronrod{};
  T gauss{};
  const T fc = f(center);
  add_scaled(kronrod, kWgk[7], fc);
  add_scaled(gauss, kWg[3], fc);
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const T f1 = f(center - dx);
    const T f2 = f(center + dx);
    add_scaled(kronrod, kWgk[j], f1);
    add_scaled(kronrod, kWgk[j], f2);
    if (j % 2 == 1) {
      add_scaled(gauss, kWg[j / 2], f1);
      add_scaled(gauss, kWg[j / 2], f2);
    }
  }
  T value{};
  add_scaled(value, half, kronrod);
  T coarse{};
  add_scaled(coarse, half, gauss);
  double error = diff_norm(value, coarse);
  if (!all_finite(value)) error = std::numeric_limits<double>::infinity();
  return {a, b, value, error};
}

}  // namespace detail

/// Adaptive integral of f over the finite interval [a, b].
template <class F>
auto integrate(F&& f, double a, double b, const QuadOptions& opts = {})
    -> QuadResult<std::decay_t<std::invoke_result_t<F&, double>>> {
  using T = std::decay_t<std::invoke_result_t<F&, double>>;
  QuadResult<T> result;
  if (a == b) {
    result.evaluations = 0;
    return result;
  }

  std::size_t evaluations = 0;
  auto counted = [&](double x) {
    ++evaluations;
    return f(x);
  };

  using Interval = detail::Interval<T>;
  auto by_error = [](const Interval& l, const Interval& r) { return l.error < r.error; };
  std::vector<Interval> heap;
  std::vector<Interval> frozen;  // intervals too narrow to split further
  heap.push_back(detail::kronrod15<T>(counted, a, b));

  auto totals = [&] {
    T sum{};
    double err = 0.0;
    for (const auto& iv : heap) {
      detail::add_scaled(sum, 1.0, iv.value);
      err += iv.error;
    }
    for (const auto& iv : frozen) {
      detail::add_scaled(sum, 1.0, iv.value);
      err += iv.error;
    }
    return std::pair{sum, err};
  };

  auto [value, error] = totals();
  while (error > std::max(opts.abs_tol, opts.rel_tol * detail::norm_inf(value))) {
    if (heap.empty() || heap.size() + frozen.size() >= opts.max_intervals) {
      result.status = QuadStatus::NotConverged;
      break;
    }
    std::pop_heap(heap.begin(), heap.end(), by_error);
    const Interval worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) ||
        (worst.b - worst.a) < 64.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(worst.a), std::abs(worst.b))) {
      frozen.push_back(worst);
    } else {
      heap.push_back(detail::kronrod15<T>(counted, worst.a, mid));
      std::push_heap(heap.begin(), heap.end(), by_error);
      heap.push_back(detail::kronrod15<T>(counted, mid, worst.b));
      std::push_heap(heap.begin(), heap.end(), by_error);
    }
    std::tie(value, error) = totals();
  }

  result.value = value;
  result.est_error = error;
  result.evaluations = evaluations;
  return result;
}

/// Integral of f over [0, inf) through x = scale * t / (1 - t).
template <class F>
auto integrate_semi_infinite(F&& f, const QuadOptions& opts = {}, double scale = 1.0) {
  auto mapped = [&f, scale](double t) {
    const double one_minus = 1.0 - t;
    const double jac = scale / (one_minus * one_minus);
    auto v = f(scale * t / one_minus);
    using T = decltype(v);
    T out{};
    detail::add_scaled(out, jac, v);
    return out;
  };
  return integrate(mapped, 0.0, 1.0, opts);
}

/// E[g(X)] for X with Rayleigh density 2*pi*c*x*exp(-pi*c*x^2). The
/// substitution u = pi*c*x^2 turns the weight into a unit exponential.
template <class G>
auto expect_rayleigh(G&& g, double c, const QuadOptions& opts = {}) {
  const double k = std::numbers::pi * c;
  auto integrand = [&g, k](double u) {
    auto v = g(std::sqrt(u / k));
    using T = decltype(v);
    T out{};
    detail::add_scaled(out, std::exp(-u), v);
    return out;
  };
  return integrate_semi_infinite(integrand, opts);
}

/// E over the typical-cell link distance R0, density 2*pi*b*lambda*x*exp(-pi*b*lambda*x^2).
template <class G>
auto expect_r0(G&& g, const NetworkParams& params, const FadingConstants& fc = fading_constants(),
               const QuadOptions& opts = {}) {
  return expect_rayleigh(std::forward<G>(g), fc.b * params.lambda, opts);
}

/// E over the nearest-interferer distance rho, density 2*pi*lambda*r*exp(-pi*lambda*r^2).
template <class G>
auto expect_rho(G&& g, const NetworkParams& params, const QuadOptions& opts = {}) {
  return expect_rayleigh(std::forward<G>(g), params.lambda, opts);
}

}  // namespace fdisac::quad
