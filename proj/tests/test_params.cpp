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

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <sstream>

#include "fdisac/params.hpp"

namespace {

using namespace fdisac;

Scenario parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

TEST(Params, Defaults) {
  const NetworkParams p;
  EXPECT_EQ(p.lambda, 1e-5);
  EXPECT_EQ(p.eta, 4.0);
  EXPECT_EQ(p.p_b, 1.0);
  EXPECT_EQ(p.p_u, 0.2);
  EXPECT_EQ(p.sigma2, 0.0);
  EXPECT_DOUBLE_EQ(p.delta(), 0.5);
  EXPECT_FALSE(validate(p).has_value());
}

TEST(Params, DistanceUnit) {
  NetworkParams p;
  EXPECT_NEAR(p.distance_unit(), 1.0 / (60.0 * std::sqrt(1e-5)), 1e-12);
  p.lambda = 4e-6;
  EXPECT_NEAR(p.distance_unit(), 1.0 / (60.0 * 2e-3), 1e-12);
}

TEST(Params, ValidationMessages) {
  NetworkParams p;
  p.lambda = 0.0;
  EXPECT_EQ(validate(p).value(), "lambda must be positive");
  p = {};
  p.eta = 2.0;
  EXPECT_EQ(validate(p).value(), "eta must exceed 2");
  p = {};
  p.p_u = -1.0;
  EXPECT_EQ(validate(p).value(), "p_u must be positive");
  p = {};
  p.zeta = -1e-3;
  EXPECT_EQ(validate(p).value(), "zeta must be non-negative");
  p = {};
  p.sigma2 = std::nan("");
  EXPECT_EQ(validate(p).value(), "sigma2 must be non-negative");

  Scenario s;
  s.r1 = 0.0;
  EXPECT_EQ(validate(s).value(), "r1 must be positive");
  s = {};
  s.theta_b = 0.0;
  EXPECT_EQ(validate(s).value(), "theta_b must be positive");
  EXPECT_THROW(require_valid(s), ConfigError);
}

TEST(Params, FadingConstantsMatchDefinition) {
  const auto& fc = fading_constants();
  const double m = std::sqrt(3.0 / 20.0);
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double h = integrator.integrate([m](double t) { return (1.0 - std::pow(t, m)) / (1.0 - t); }, 0.0, 1.0);
  EXPECT_NEAR(fc.m_r, m, 1e-15);
  EXPECT_NEAR(fc.eps_r, h / 2.0, 1e-13);
  EXPECT_EQ(fc.b, 1.3);
}

TEST(Params, DbConversion) {
  EXPECT_DOUBLE_EQ(db_to_linear(-30.0), 1e-3);
  EXPECT_DOUBLE_EQ(db_to_linear(0.0), 1.0);
  EXPECT_NEAR(linear_to_db(1e-6), -60.0, 1e-12);
}

TEST(Params, ParseReal) {
  EXPECT_EQ(parse_real(" 1e-12 ", "x"), 1e-12);
  EXPECT_EQ(parse_real("+2.5", "x"), 2.5);
  EXPECT_THROW(parse_real("1,5", "x"), ConfigError);
  EXPECT_THROW(parse_real("", "x"), ConfigError);
  EXPECT_THROW(parse_real("3abc", "x"), ConfigError);
}

TEST(Params, ParseLength) {
  const auto a = parse_length("5v", "r1");
  EXPECT_TRUE(a.in_v);
  EXPECT_EQ(a.value, 5.0);
  const auto b = parse_length("123.5", "r1");
  EXPECT_FALSE(b.in_v);
  EXPECT_EQ(b.resolve(NetworkParams{}), 123.5);
  EXPECT_NEAR(a.resolve(NetworkParams{}), 5.0 * NetworkParams{}.distance_unit(), 1e-12);
  EXPECT_THROW(parse_length("v", "r1"), ConfigError);
}

TEST(Params, ParseBool) {
  EXPECT_TRUE(parse_bool("true", "x"));
  EXPECT_FALSE(parse_bool("0", "x"));
  EXPECT_THROW(parse_bool("maybe", "x"), ConfigError);
}

TEST(Config, ParsesAllKeys) {
  const auto sc = parse(
      "# comment\n"
      "lambda = 2e-5\n"
      "eta = 3.5\n"
      "p_b = 2\n"
      "p_u = 0.5\n"
      "zeta = 1e-9\n"
      "sigma2 = 1e-15\n"
      "\n"
      "r1 = 7v\n"
      "theta_b_db = -60\n"
      "theta_u_db = -30\n"
      "intercell = false\n");
  EXPECT_EQ(sc.params.lambda, 2e-5);
  EXPECT_EQ(sc.params.eta, 3.5);
  EXPECT_EQ(sc.params.p_b, 2.0);
  EXPECT_EQ(sc.params.p_u, 0.5);
  EXPECT_EQ(sc.params.zeta, 1e-9);
  EXPECT_EQ(sc.params.sigma2, 1e-15);
  EXPECT_NEAR(sc.r1, 7.0 / (60.0 * std::sqrt(2e-5)), 1e-9);
  EXPECT_NEAR(sc.theta_b, 1e-6, 1e-20);
  EXPECT_NEAR(sc.theta_u, 1e-3, 1e-17);
  EXPECT_FALSE(sc.intercell);
}

TEST(Config, EmptyGivesDefaults) {
  const auto sc = parse("");
  EXPECT_EQ(sc.params.lambda, 1e-5);
  EXPECT_NEAR(sc.r1, 5.0 * sc.params.distance_unit(), 1e-12);
  EXPECT_TRUE(sc.intercell);
}

TEST(Config, Errors) {
  EXPECT_THROW(parse("nonsense\n"), ConfigError);
  EXPECT_THROW(parse("colour = blue\n"), ConfigError);
  EXPECT_THROW(parse("lambda = -1\n"), ConfigError);
  EXPECT_THROW(parse("eta = 1.5\n"), ConfigError);
  EXPECT_THROW(parse("r1 = 0v\n"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/dir/file.conf"), ConfigError);
}

TEST(Config, ErrorNamesLine) {
  try {
    parse("lambda = 1e-5\nbogus = 1\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

}  // namespace
