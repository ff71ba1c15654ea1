#include "ismpc/cli.hpp"

#include "ismpc/feasibility.hpp"
#include "ismpc/scenario.hpp"
#include "ismpc/tails.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>

namespace ismpc::cli {

namespace {

void print_summary(const sim::RunLog& log, double seconds, std::ostream& out) {
  double min_margin = std::numeric_limits<double>::infinity();
  for (const auto& r : log.records) min_margin = std::min({min_margin, r.margin_x, r.margin_y});
  const double t_end = log.records.empty() ? 0.0 : log.records.back().t;
  out << "scenario:        " << log.scenario << '\n'
      << "exit:            " << sim::to_string(log.exit) << " at t = " << t_end << " s\n"
      << "samples:         " << log.records.size() << '\n'
      << "max |com - zmp|: " << sim::max_com_zmp_distance(log) << " m\n"
      << "min margin:      " << min_margin << " m" << (log.approximate_margins ? " (approximate)" : "") << '\n'
      << "verdict:         " << sim::stability_verdict(log) << '\n'
      << "wall time:       " << std::setprecision(3) << seconds << " s\n";
}

int execute(const sim::Scenario& scenario, const std::string& out_path, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  const sim::RunLog log = sim::run_scenario(scenario);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  print_summary(log, secs, out);
  if (!out_path.empty()) {
    try {
      sim::emit_csv(log, out_path);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return 2;
    }
  }
  return sim::exit_code(log);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gait generation with intrinsically stable MPC on the linear inverted pendulum"};
  app.require_subcommand(1);

  std::string config_path;
  std::string builtin_name;
  std::string out_path;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario from a config file");
  run_cmd->add_option("config", config_path, "Scenario config file")->required();
  run_cmd->add_option("--out", out_path, "Write the run log as CSV");

  auto* builtin_cmd = app.add_subcommand("run-builtin", "Run a builtin scenario");
  builtin_cmd->add_option("name", builtin_name, "Builtin scenario name")->required();
  builtin_cmd->add_option("--out", out_path, "Write the run log as CSV");

  auto* show_cmd = app.add_subcommand("show-builtin", "Print the config of a builtin scenario");
  show_cmd->add_option("name", builtin_name, "Builtin scenario name")->required();

  auto* list_cmd = app.add_subcommand("list-scenarios", "List builtin scenarios");

  double eta = 0.0;
  double dz = 0.0;
  double vmax = 0.0;
  double tc = 0.0;
  auto* bound_cmd = app.add_subcommand("feasibility-bound", "Preview horizon that guarantees recursive feasibility");
  bound_cmd->add_option("--eta", eta, "Pendulum natural frequency [1/s]")->required();
  bound_cmd->add_option("--dz", dz, "ZMP region size along the axis [m]")->required();
  bound_cmd->add_option("--vmax", vmax, "Bound on tail ZMP velocity [m/s]")->required();
  bound_cmd->add_option("--tc", tc, "Control horizon [s]")->required();

  double gravity = 9.81;
  double height = 0.78;
  auto* appendix_cmd = app.add_subcommand("verify-appendix", "Quadrature checks of the exponential weighting");
  appendix_cmd->add_option("--gravity", gravity, "Gravity [m/s^2]");
  appendix_cmd->add_option("--com-height", height, "CoM height [m]");

  std::string csv_a;
  std::string csv_b;
  double threshold = 0.01;
  auto* compare_cmd = app.add_subcommand("compare", "Compare two CSV run logs");
  compare_cmd->add_option("a", csv_a)->required();
  compare_cmd->add_option("b", csv_b)->required();
  compare_cmd->add_option("--threshold", threshold, "CoM difference reported as first exceedance [m]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd) return execute(sim::load_scenario(config_path), out_path, out, err);
    if (*builtin_cmd) return execute(sim::builtin_scenario(builtin_name), out_path, out, err);
    if (*show_cmd) {
      out << sim::builtin_config_text(builtin_name);
      return 0;
    }
    if (*list_cmd) {
      for (const auto& b : sim::builtin_scenarios()) {
        out << std::left << std::setw(26) << b.name << b.description << '\n';
      }
      return 0;
    }
    if (*bound_cmd) {
      const double tp = feasibility::recursive_feasibility_preview_bound(eta, tc, vmax, dz);
      out << std::setprecision(6) << "Tp >= " << tp << " s\n";
      return 0;
    }
    if (*appendix_cmd) {
      const auto checks = tails::verify_exponential_weighting_properties(lip::LipParams(gravity, height, 0.01));
      bool ok = true;
      for (const auto& c : checks) {
        out << (c.pass ? "PASS " : "FAIL ") << std::left << std::setw(34) << c.name << std::setprecision(12)
            << " computed " << c.computed << "  expected " << c.expected << '\n';
        ok = ok && c.pass;
      }
      return ok ? 0 : 1;
    }
    if (*compare_cmd) {
      auto read = [](const std::string& path) {
        std::ifstream in(path);
        if (!in) throw sim::ConfigError("cannot open '" + path + "'");
        return sim::parse_csv(in);
      };
      const auto rep = sim::compare_runs(read(csv_a), read(csv_b), threshold);
      out << "samples compared: " << rep.samples << (rep.truncated ? " (truncated)" : "") << '\n'
          << "max |d com|:      " << rep.max_com_delta << " m\n"
          << "max |d zmp|:      " << rep.max_zmp_delta << " m\n"
          << "first exceedance: ";
      if (rep.first_exceed_time) {
        out << *rep.first_exceed_time << " s\n";
      } else {
        out << "none\n";
      }
      out << "verdicts:         " << rep.verdict_a << ", " << rep.verdict_b << '\n';
      return 0;
    }
  } catch (const sim::ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace ismpc::cli
