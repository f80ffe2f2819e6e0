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

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "fdisac/specfun.hpp"

namespace fdisac {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Static network constants. All quantities are linear; dB only appears at
/// the command-line and config-file boundary.
struct NetworkParams {
  double lambda = 1e-5;  // BS intensity per unit area
  double eta = 4.0;      // path-loss exponent
  double p_b = 1.0;      // BS transmit power
  double p_u = 0.2;      // UE transmit power
  double zeta = 1e-12;   // residual self-interference fraction
  double sigma2 = 0.0;   // noise power

  double delta() const { return 2.0 / eta; }

  /// Length unit v = 1/(60 sqrt(lambda)) used to express target distances.
  double distance_unit() const { return 1.0 / (60.0 * std::sqrt(lambda)); }
};

/// One evaluation point: network constants, target distance and thresholds.
struct Scenario {
  NetworkParams params;
  double r1 = 5.0 / (60.0 * std::sqrt(1e-5));
  double theta_b = 1e-3;  // downlink / radar-mode SINR threshold
  double theta_u = 1e-3;  // uplink SINR threshold
  bool intercell = true;
};

/// Constants of the approximate radar joint-fading law and the typical-cell
/// link distance.
struct FadingConstants {
  double m_r;    // shape, sqrt(3/20)
  double eps_r;  // rate, H(m_r)/2
  double b;      // typical-cell correction, 13/10
};

inline const FadingConstants& fading_constants() {
  static const FadingConstants constants = [] {
    const double m = std::sqrt(3.0 / 20.0);
    return FadingConstants{m, specfun::harmonic_generalized(m) / 2.0, 13.0 / 10.0};
  }();
  return constants;
}

inline double db_to_linear(double x_db) { return std::pow(10.0, x_db / 10.0); }

inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

/// Returns the first violated constraint, or nothing when the parameters are usable.
inline std::optional<std::string> validate(const NetworkParams& p) {
  if (!(p.lambda > 0.0) || !std::isfinite(p.lambda)) return "lambda must be positive";
  if (!(p.eta > 2.0) || !std::isfinite(p.eta)) return "eta must exceed 2";
  if (!(p.p_b > 0.0) || !std::isfinite(p.p_b)) return "p_b must be positive";
  if (!(p.p_u > 0.0) || !std::isfinite(p.p_u)) return "p_u must be positive";
  if (!(p.zeta >= 0.0)) return "zeta must be non-negative";
  if (!(p.sigma2 >= 0.0)) return "sigma2 must be non-negative";
  return std::nullopt;
}

inline std::optional<std::string> validate(const Scenario& s) {
  if (auto err = validate(s.params)) return err;
  if (!(s.r1 > 0.0)) return "r1 must be positive";
  if (!(s.theta_b > 0.0)) return "theta_b must be positive";
  if (!(s.theta_u > 0.0)) return "theta_u must be positive";
  return std::nullopt;
}

template <class T>
void require_valid(const T& value) {
  if (auto err = validate(value)) throw ConfigError(*err);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace detail

/// Locale-independent strict parse of a real number.
inline double parse_real(std::string_view text, std::string_view what) {
  text = detail::trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw ConfigError("invalid number for " + std::string(what) + ": '" + std::string(text) + "'");
  }
  return value;
}

/// A length that is either absolute ("26.35") or in units of v ("5v").
struct LengthSpec {
  double value = 0.0;
  bool in_v = false;

  double resolve(const NetworkParams& p) const { return in_v ? value * p.distance_unit() : value; }
};

inline LengthSpec parse_length(std::string_view text, std::string_view what) {
  text = detail::trim(text);
  if (!text.empty() && text.back() == 'v') {
    return {parse_real(text.substr(0, text.size() - 1), what), true};
  }
  return {parse_real(text, what), false};
}

inline bool parse_bool(std::string_view text, std::string_view what) {
  text = detail::trim(text);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("invalid boolean for " + std::string(what) + ": '" + std::string(text) + "'");
}

/// Parses the flat `key = value` configuration format. Blank lines and lines
/// starting with '#' are skipped. Missing keys keep the defaults of
/// NetworkParams/Scenario; r1 defaults to 5v. Unknown keys are errors.
inline Scenario parse_config(std::istream& in) {
  Scenario scenario;
  LengthSpec r1{5.0, true};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = detail::trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(detail::trim(view.substr(0, eq)));
    const std::string_view value = detail::trim(view.substr(eq + 1));
    auto& p = scenario.params;
    if (key == "lambda") p.lambda = parse_real(value, key);
    else if (key == "eta") p.eta = parse_real(value, key);
    else if (key == "p_b") p.p_b = parse_real(value, key);
    else if (key == "p_u") p.p_u = parse_real(value, key);
    else if (key == "zeta") p.zeta = parse_real(value, key);
    else if (key == "sigma2") p.sigma2 = parse_real(value, key);
    else if (key == "r1") r1 = parse_length(value, key);
    else if (key == "theta_b_db") scenario.theta_b = db_to_linear(parse_real(value, key));
    else if (key == "theta_u_db") scenario.theta_u = db_to_linear(parse_real(value, key));
    else if (key == "intercell") scenario.intercell = parse_bool(value, key);
    else throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
  require_valid(scenario.params);
  scenario.r1 = r1.resolve(scenario.params);
  require_valid(scenario);
  return scenario;
}

inline Scenario load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

}  // namespace fdisac
