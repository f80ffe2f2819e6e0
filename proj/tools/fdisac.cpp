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

// fdisac: sweeps, engine cross-checks, crossover search and raw simulation dumps.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "fdisac/cli.hpp"

namespace {

using namespace fdisac;

struct Common {
  std::string config;
  std::uint64_t seed = netsim::SimOptions{}.seed;
  std::uint64_t reps = netsim::SimOptions{}.n_reps;
  std::string out;
};

void add_common(CLI::App* sub, Common& c, bool with_sim) {
  sub->add_option("--config", c.config, "Scenario file (key = value); defaults apply when omitted");
  sub->add_option("--out", c.out, "Output path (default: stdout)");
  if (with_sim) {
    sub->add_option("--seed", c.seed, "Simulation seed");
    sub->add_option("--reps", c.reps, "Simulation repetitions")->check(CLI::PositiveNumber);
  }
}

Scenario load(const Common& c) {
  if (!c.config.empty()) return load_config(c.config);
  std::istringstream defaults;
  return parse_config(defaults);
}

netsim::SimOptions sim_options(const Common& c) {
  netsim::SimOptions o;
  o.seed = c.seed;
  o.n_reps = c.reps;
  return o;
}

// Opens the output before any computation so an unwritable path fails fast.
std::ostream& open_output(const Common& c, std::ofstream& file) {
  if (c.out.empty()) return std::cout;
  file.open(c.out);
  if (!file) throw ConfigError("cannot write output file '" + c.out + "'");
  return file;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Full-duplex ISAC network: analysis and Monte-Carlo engines"};
  app.require_subcommand(1);

  Common common;

  auto* sweep = app.add_subcommand("sweep", "Sweep one parameter and write CSV");
  add_common(sweep, common, true);
  std::string var = "theta_db", engine = "both", order = "both", start_text = "-60", stop_text = "0";
  int points = 13;
  bool log_spacing = false;
  sweep->add_option("--var", var, "theta_db | theta_b_db | theta_u_db | r1 | p_u | zeta");
  sweep->add_option("--start", start_text, "First value (r1 accepts a 'v' suffix)");
  sweep->add_option("--stop", stop_text, "Last value");
  sweep->add_option("--points", points, "Number of points");
  sweep->add_flag("--log", log_spacing, "Log spacing");
  sweep->add_option("--engine", engine, "analysis | sim | both");
  sweep->add_option("--order", order, "decode-first | detect-first | both");

  auto* verify = app.add_subcommand("verify", "Compare both engines over -60..0 dB");
  add_common(verify, common, true);
  double tolerance = 0.03;
  verify->add_option("--tolerance", tolerance, "Max absolute analytic-MC gap");

  auto* cross = app.add_subcommand("crossover", "Find where detect-first and decode-first swap");
  add_common(cross, common, false);
  std::string cross_var = "r1";
  double cross_lo = 1.0, cross_hi = 12.0;
  int scan = 24;
  cross->add_option("--var", cross_var, "r1 (in multiples of v) | p_u");
  cross->add_option("--start", cross_lo, "Range start");
  cross->add_option("--stop", cross_hi, "Range end");
  cross->add_option("--points", scan, "Scan grid size")->check(CLI::Range(2, 100000));

  auto* simulate = app.add_subcommand("simulate", "Dump one row per realization");
  add_common(simulate, common, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitConfig;
  }

  try {
    std::ofstream file;
    if (sweep->parsed()) {
      cli::SweepSpec spec;
      spec.variable = cli::parse_variable(var);
      spec.engines = cli::parse_engines(engine);
      spec.order = cli::parse_order(order);
      spec.points = points;
      spec.log_spacing = log_spacing;
      if (spec.variable == cli::SweepVariable::R1) {
        const auto a = parse_length(start_text, "--start");
        const auto b = parse_length(stop_text, "--stop");
        if (a.in_v != b.in_v) throw cli::SpecError("--start and --stop must use the same length unit");
        spec.r1_in_v = a.in_v;
        spec.start = a.value;
        spec.stop = b.value;
      } else {
        spec.start = parse_real(start_text, "--start");
        spec.stop = parse_real(stop_text, "--stop");
      }
      spec.validate();
      const Scenario base = load(common);
      std::ostream& out = open_output(common, file);
      cli::write_csv(out, spec.variable, cli::run_sweep(base, spec, sim_options(common)));
      return cli::kExitOk;
    }
    if (verify->parsed()) {
      const Scenario base = load(common);
      std::ostream& out = open_output(common, file);
      std::array<double, cli::kQuantityCount> tol;
      tol.fill(tolerance);
      const auto rep = cli::verify(base, tol, sim_options(common));
      cli::print_verify(out, rep, tol);
      return rep.passed ? cli::kExitOk : cli::kExitVerifyFailed;
    }
    if (cross->parsed()) {
      const auto v = cli::parse_crossover_variable(cross_var);
      const Scenario base = load(common);
      std::ostream& out = open_output(common, file);
      analysis::CrossoverOptions opts;
      opts.scan_points = scan;
      const auto root = cli::crossover(base, v, cross_lo, cross_hi, opts);
      if (root) out << cli::format_number(*root) << '\n';
      else out << "none\n";
      return cli::kExitOk;
    }
    if (simulate->parsed()) {
      const Scenario base = load(common);
      std::ostream& out = open_output(common, file);
      cli::write_raw(out, netsim::simulate_raw(base, sim_options(common)));
      return cli::kExitOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitRuntime;
  }
  return cli::kExitOk;
}
