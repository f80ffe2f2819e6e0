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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fdisac/netsim.hpp"

namespace {

using namespace fdisac;
using namespace fdisac::netsim;

Scenario default_scenario() {
  Scenario sc;
  sc.r1 = 5.0 * sc.params.distance_unit();
  return sc;
}

NetworkRealization hand_built() {
  NetworkRealization r;
  r.bs_points = {{100.0, 0.0}};
  r.ue_points = {{80.0, 30.0}};
  r.tue = {20.0, 10.0};
  r.rho = 100.0;
  r.r0 = std::hypot(20.0, 10.0);
  r.fading.h0 = 0.7;
  r.fading.h1 = 1.3;
  r.fading.bs_to_tbs = {1.1};
  r.fading.ue_to_tbs = {0.4};
  r.fading.bs_to_tue = {2.0};
  r.fading.ue_to_tue = {0.9};
  return r;
}

TEST(Sinr, HandBuiltRealization) {
  Scenario sc;
  sc.params.p_b = 1.0;
  sc.params.p_u = 0.2;
  sc.params.zeta = 1e-9;
  sc.params.sigma2 = 1e-12;
  sc.r1 = 60.0;
  const auto r = hand_built();
  const auto s = sample_sinrs(r, sc);

  // eta = 4 distances squared: tBS-BS 1e4, tBS-UE 7300, tUE-BS 6500, tUE-UE 4000, tBS-tUE 500.
  const double i_bs_tbs = 1.1 / (1e4 * 1e4);
  const double i_ue_tbs = 0.4 / (7300.0 * 7300.0);
  const double i_bs_tue = 2.0 / (6500.0 * 6500.0);
  const double i_ue_tue = 0.9 / (4000.0 * 4000.0);
  const double link = 1.0 / (500.0 * 500.0);
  const double echo = 1.0 * 1.3 * 1.3 / std::pow(60.0, 8.0);
  const double uplink = 0.2 * 0.7 * link;
  const double d_tbs = 1.0 * i_bs_tbs + 0.2 * i_ue_tbs + 1.0 * 1e-9 + 1e-12;
  const double d_tue = 1.0 * i_bs_tue + 0.2 * i_ue_tue + 0.2 * 1e-9 + 1e-12;

  auto near = [](double got, double want) { EXPECT_NEAR(got / want, 1.0, 1e-12); };
  near(s.sinr_ue, 1.0 * 0.7 * link / d_tue);
  near(s.sinr_bs_decode1, uplink / (echo + d_tbs));
  near(s.sinr_bs_detect2, echo / d_tbs);
  near(s.sinr_bs_detect1, echo / (uplink + d_tbs));
  near(s.sinr_bs_decode2, uplink / d_tbs);
}

TEST(Sinr, IntercellDisabledDropsSums) {
  Scenario sc;
  sc.r1 = 60.0;
  sc.intercell = false;
  const auto r = hand_built();
  const auto s = sample_sinrs(r, sc);
  const double uplink = sc.params.p_u * 0.7 / (500.0 * 500.0);
  EXPECT_NEAR(s.sinr_bs_decode2 / (uplink / (sc.params.p_b * sc.params.zeta)), 1.0, 1e-12);
}

TEST(Sinr, HugeSelfInterferenceKillsAll) {
  Scenario sc = default_scenario();
  sc.params.zeta = 1e300;
  const auto r = generate_realization(sc.params, GeometryConfig::for_density(sc.params.lambda), 1, 0);
  const auto s = sample_sinrs(r, sc);
  for (double v : {s.sinr_ue, s.sinr_bs_decode1, s.sinr_bs_detect2, s.sinr_bs_detect1, s.sinr_bs_decode2}) {
    EXPECT_LT(v, 1e-250);
  }
}

TEST(Realization, GeometryInvariants) {
  const NetworkParams p;
  const auto geom = GeometryConfig::for_density(p.lambda);
  for (std::uint64_t rep = 0; rep < 100; ++rep) {
    const auto r = generate_realization(p, geom, 99, rep);
    ASSERT_EQ(r.bs_points.size(), r.ue_points.size());
    ASSERT_EQ(r.fading.ue_to_tue.size(), r.bs_points.size());
    double rho = std::numeric_limits<double>::infinity();
    for (const auto& b : r.bs_points) rho = std::min(rho, geometry::norm(b));
    EXPECT_EQ(r.rho, rho);
    EXPECT_DOUBLE_EQ(r.r0, geometry::norm(r.tue));
    // tUE is closest to the origin BS
    for (const auto& b : r.bs_points) EXPECT_LE(r.r0, geometry::norm(b - r.tue) * (1.0 + 1e-12));
    // every UE is closest to its own BS
    for (std::size_t i = 0; i < r.ue_points.size(); i += 7) {
      const double own = geometry::norm(r.ue_points[i] - r.bs_points[i]);
      EXPECT_LE(own, geometry::norm(r.ue_points[i]) * (1.0 + 1e-12));
      for (const auto& b : r.bs_points) EXPECT_LE(own, geometry::norm(r.ue_points[i] - b) * (1.0 + 1e-12));
    }
    EXPECT_GT(r.fading.h0, 0.0);
    EXPECT_GT(r.fading.h1, 0.0);
  }
}

TEST(Realization, ExpectedInterfererCount) {
  const NetworkParams p;
  const auto geom = GeometryConfig::for_density(p.lambda);
  double total = 0.0;
  const int n = 400;
  for (int rep = 0; rep < n; ++rep) {
    total += static_cast<double>(generate_realization(p, geom, 5, rep).bs_points.size());
  }
  const double mean = p.lambda * std::numbers::pi * std::pow(geom.outer_radius(), 2);
  EXPECT_NEAR(mean, 144.0, 1e-9);
  EXPECT_NEAR(total / n, mean, 4.0 * std::sqrt(mean / n));
}

TEST(Realization, LargerWindowKeepsInnerNetwork) {
  const NetworkParams p;
  const auto small = generate_realization(p, GeometryConfig::for_density(p.lambda, 1.0), 21, 4);
  const auto large = generate_realization(p, GeometryConfig::for_density(p.lambda, 2.0), 21, 4);
  ASSERT_GT(large.bs_points.size(), small.bs_points.size());
  for (std::size_t i = 0; i < small.bs_points.size(); ++i) {
    EXPECT_EQ(small.bs_points[i].x, large.bs_points[i].x);
    EXPECT_EQ(small.fading.bs_to_tbs[i], large.fading.bs_to_tbs[i]);
  }
  // Cells are clipped from different starting polygons, so sampled positions agree to rounding.
  EXPECT_NEAR(small.tue.x, large.tue.x, 1e-9 * std::abs(small.tue.x));
  EXPECT_NEAR(small.tue.y, large.tue.y, 1e-9 * std::abs(small.tue.y));
  for (std::size_t i = 0; i < small.ue_points.size(); ++i) {
    if (geometry::norm(small.bs_points[i]) > 0.5 * GeometryConfig::for_density(p.lambda).window_radius) continue;
    EXPECT_NEAR(small.ue_points[i].x, large.ue_points[i].x, 1e-6) << i;
    EXPECT_NEAR(small.ue_points[i].y, large.ue_points[i].y, 1e-6) << i;
  }
  EXPECT_EQ(small.fading.h1, large.fading.h1);
  EXPECT_EQ(small.rho, large.rho);
}

TEST(Realization, EmptyWindowHasNoInterferers) {
  const NetworkParams p;
  const auto r = generate_realization(p, GeometryConfig{0.0, 0.0, 64}, 1, 0);
  EXPECT_TRUE(r.bs_points.empty());
  EXPECT_TRUE(std::isinf(r.rho));
  const auto sums = interference_sums(r, 4.0);
  EXPECT_EQ(sums.bs_at_tbs + sums.ue_at_tbs + sums.bs_at_tue + sums.ue_at_tue, 0.0);
}

TEST(Realization, StageTwoNeverWorse) {
  Scenario sc = default_scenario();
  const auto geom = GeometryConfig::for_density(sc.params.lambda);
  for (std::uint64_t rep = 0; rep < 300; ++rep) {
    const auto s = sample_sinrs(generate_realization(sc.params, geom, 3, rep), sc);
    EXPECT_GE(s.sinr_bs_detect2, s.sinr_bs_detect1);
    EXPECT_GE(s.sinr_bs_decode2, s.sinr_bs_decode1);
    EXPECT_EQ(s.decode1_then_detect2, s.sinr_bs_decode1 > sc.theta_u && s.sinr_bs_detect2 > sc.theta_b);
    EXPECT_EQ(s.detect1_then_decode2, s.sinr_bs_detect1 > sc.theta_b && s.sinr_bs_decode2 > sc.theta_u);
  }
}

TEST(Estimate, JointBelowMarginals) {
  const auto est = estimate(default_scenario(), {2000, 17, 1, 1.0});
  EXPECT_LE(est[Event::DetectBsSecondJoint].value, est[Event::DecodeBsFirst].value);
  EXPECT_LE(est[Event::DetectBsSecondJoint].value, est[Event::DetectBsSecondGiven].value);
  EXPECT_LE(est[Event::DecodeBsSecondJoint].value, est[Event::DetectBsFirst].value);
  EXPECT_LE(est[Event::DecodeBsSecondJoint].value, est[Event::DecodeBsSecondGiven].value);
  EXPECT_LE(est[Event::DecodeBsFirst].value, est[Event::DecodeBsSecondGiven].value);
  EXPECT_LE(est[Event::DetectBsFirst].value, est[Event::DetectBsSecondGiven].value);
}

TEST(Estimate, VanishingThresholdsGiveOne) {
  Scenario sc = default_scenario();
  sc.theta_b = sc.theta_u = 1e-300;
  const auto est = estimate(sc, {500, 1, 1, 1.0});
  for (const auto& e : est.events) {
    EXPECT_EQ(e.value, 1.0);
    EXPECT_EQ(e.stderr_, 0.0);
  }
}

TEST(Estimate, StderrFormula) {
  const auto e = McEstimate::from_count(300, 1000);
  EXPECT_DOUBLE_EQ(e.value, 0.3);
  EXPECT_DOUBLE_EQ(e.stderr_, std::sqrt(0.3 * 0.7 / 1000.0));
  EXPECT_EQ(e.n, 1000u);
}

TEST(Estimate, StderrShrinksWithRepetitions) {
  Scenario sc = default_scenario();
  sc.theta_b = sc.theta_u = db_to_linear(-20.0);
  const auto small = estimate(sc, {400, 8, 1, 1.0});
  const auto large = estimate(sc, {6400, 8, 1, 1.0});
  // stderr = sqrt(p(1-p)/n); compare against the ratio implied by each run's own estimate
  const auto& a = small[Event::DecodeUe];
  const auto& b = large[Event::DecodeUe];
  const double want = 4.0 * std::sqrt(a.value * (1.0 - a.value) / (b.value * (1.0 - b.value)));
  EXPECT_NEAR(a.stderr_ / b.stderr_, want, 1e-9 * want);
  EXPECT_LT(b.stderr_, a.stderr_);
}

TEST(Estimate, BitIdenticalAcrossWorkerCounts) {
  Scenario sc = default_scenario();
  sc.theta_b = sc.theta_u = db_to_linear(-20.0);
  const auto one = estimate(sc, {600, 12345, 1, 1.0});
  for (unsigned w : {2u, 3u, 7u}) {
    const auto many = estimate(sc, {600, 12345, w, 1.0});
    for (std::size_t e = 0; e < kEventCount; ++e) {
      EXPECT_EQ(one.events[e].value, many.events[e].value);
      EXPECT_EQ(one.events[e].stderr_, many.events[e].stderr_);
    }
  }
  const auto other_seed = estimate(sc, {600, 54321, 1, 1.0});
  EXPECT_NE(one[Event::DecodeUe].value + one[Event::DetectBsFirst].value,
            other_seed[Event::DecodeUe].value + other_seed[Event::DetectBsFirst].value);
}

TEST(Estimate, ManyMatchesSingle) {
  Scenario a = default_scenario(), b = default_scenario();
  a.theta_b = a.theta_u = db_to_linear(-30.0);
  b.theta_b = b.theta_u = db_to_linear(-10.0);
  const std::vector<Scenario> both = {a, b};
  const auto many = estimate_many(both, {300, 4, 1, 1.0});
  const auto single = estimate(b, {300, 4, 1, 1.0});
  for (std::size_t e = 0; e < kEventCount; ++e) EXPECT_EQ(many[1].events[e].value, single.events[e].value);
  EXPECT_THROW(estimate(a, {0, 4, 1, 1.0}), std::invalid_argument);
}

TEST(Estimate, EventNames) {
  EXPECT_STREQ(to_string(Event::DecodeUe), "decode_ue");
  EXPECT_STREQ(to_string(Event::DetectBsSecondJoint), "detect_bs_2nd_joint");
  EXPECT_STREQ(to_string(Event::DecodeBsSecondGiven), "decode_bs_2nd_given");
}

// Mean of R0^2 against the typical-cell law with b = 13/10.
TEST(Statistics, MeanSquaredLinkDistance) {
  const NetworkParams p;
  const auto rows = simulate_raw(default_scenario(), {10000, 20240601, 0, 1.0});
  double sum = 0.0, sum2 = 0.0;
  for (const auto& r : rows) {
    const double x = r.r0 * r.r0;
    sum += x;
    sum2 += x * x;
  }
  const double n = static_cast<double>(rows.size());
  const double mean = sum / n;
  const double se = std::sqrt((sum2 / n - mean * mean) / n);
  const double want = 1.0 / (std::numbers::pi * 1.3 * p.lambda);
  EXPECT_LE(std::abs(mean - want), 3.0 * se) << "mean=" << mean << " want=" << want << " se=" << se;
}

TEST(Statistics, NearestInterfererDistanceKs) {
  const NetworkParams p;
  const auto rows = simulate_raw(default_scenario(), {10000, 20240601, 0, 1.0});
  std::vector<double> rho;
  for (const auto& r : rows) rho.push_back(r.rho);
  std::sort(rho.begin(), rho.end());
  double d = 0.0;
  const double n = static_cast<double>(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double f = -std::expm1(-std::numbers::pi * p.lambda * rho[i] * rho[i]);
    d = std::max({d, std::abs(f - i / n), std::abs(f - (i + 1) / n)});
  }
  EXPECT_LT(d, 1.358 / std::sqrt(n));
}

TEST(Raw, RowsAreIndexedAndReproducible) {
  const auto a = simulate_raw(default_scenario(), {50, 3, 1, 1.0});
  const auto b = simulate_raw(default_scenario(), {50, 3, 2, 1.0});
  ASSERT_EQ(a.size(), 50u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].rep, i);
    EXPECT_EQ(a[i].r0, b[i].r0);
    EXPECT_EQ(a[i].sinr.sinr_bs_detect1, b[i].sinr.sinr_bs_detect1);
  }
  const std::string header = kRawHeader;
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), 9);
}

}  // namespace
