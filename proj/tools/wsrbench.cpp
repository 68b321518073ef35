// SPDX-License-Identifier: Apache-2.0
//
// Benchmark and verification harness for the weighted sum-rate solvers.
//   run                 solver sweeps over seeded channel draws, CSV + JSON out
//   verify              numerical identity suite, JSON-lines report
//   sweep               convergence-time comparison across problem sizes
//   relaxed-bisection   multiplier-search relaxation study
//   print-default-config

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "wsr/bench.hpp"
#include "wsr/equivalence.hpp"

namespace {

wsr::ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw wsr::ConfigError("--config", "cannot open '" + path + "'");
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw wsr::ConfigError("--config", std::string("invalid JSON: ") + e.what());
  }
  return wsr::config_from_json(j);
}

void apply_overrides(wsr::ExperimentConfig& cfg, int seeds, const std::string& out,
                     const std::string& eta_mode, bool parallel) {
  if (seeds > 0) cfg.seed_count = seeds;
  if (!out.empty()) cfg.out_dir = out;
  if (!eta_mode.empty()) cfg.eta_mode = eta_mode;
  if (parallel) cfg.parallel = true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weighted sum-rate beamforming benchmark harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string eta_mode;
  int seeds = 0;
  bool parallel = false;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", config_path, "experiment config (JSON)");
    if (config_required) opt->required();
    sub->add_option("--out", out_dir, "output directory override");
    sub->add_option("--seeds", seeds, "seed count override");
    sub->add_option("--eta-mode", eta_mode, "curvature bound: exact|frobenius")
        ->check(CLI::IsMember({"exact", "frobenius"}));
    sub->add_flag("--parallel", parallel, "run seeds concurrently (numeric output unchanged)");
  };

  auto* run_cmd = app.add_subcommand("run", "run configured solvers over seeded channel draws");
  add_common(run_cmd, true);

  auto* verify_cmd = app.add_subcommand("verify", "run the numerical identity suite");
  int verify_seeds = 20;
  int verify_users = 4;
  int verify_antennas = 4;
  int verify_trials = 100;
  double inject_error = 0.0;
  std::string verify_eta = "frobenius";
  verify_cmd->add_option("--seeds", verify_seeds, "number of seeded instances");
  verify_cmd->add_option("--users", verify_users, "users / links per instance");
  verify_cmd->add_option("--antennas", verify_antennas, "antennas (and streams) per node");
  verify_cmd->add_option("--trials", verify_trials, "trial points per surrogate identity");
  verify_cmd->add_option("--eta-mode", verify_eta, "curvature bound: exact|frobenius")
      ->check(CLI::IsMember({"exact", "frobenius"}));
  verify_cmd->add_option("--inject-map-error", inject_error,
                         "perturb one auxiliary map (negative control)");

  auto* sweep_cmd = app.add_subcommand("sweep", "convergence-time sweep for mm and mm_plus");
  std::string axis = "antennas";
  std::vector<int> values;
  add_common(sweep_cmd, true);
  sweep_cmd->add_option("--axis", axis, "sweep axis: users|antennas")
      ->check(CLI::IsMember({"users", "antennas"}));
  sweep_cmd->add_option("--values", values, "axis values, ascending")->required()->delimiter(',');

  auto* relaxed_cmd =
      app.add_subcommand("relaxed-bisection", "rerun mm with relaxed multiplier searches");
  std::vector<int> thresholds;
  add_common(relaxed_cmd, true);
  relaxed_cmd->add_option("--thresholds", thresholds, "exponents i; search stops at width 2^-i")
      ->required()
      ->delimiter(',');

  app.add_subcommand("print-default-config", "emit the default experiment config as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("print-default-config")) {
      std::cout << wsr::to_json(wsr::default_experiment_config()).dump(2) << '\n';
      return 0;
    }
    if (app.got_subcommand(run_cmd)) {
      wsr::ExperimentConfig cfg = load_config(config_path);
      apply_overrides(cfg, seeds, out_dir, eta_mode, parallel);
      const auto outcome = wsr::run_experiment(cfg);
      wsr::write_outputs(outcome, cfg.out_dir);
      std::cout << wsr::aggregate_results(outcome).dump(2) << '\n';
      if (!outcome.all_ok) {
        for (const auto& r : outcome.runs)
          if (!r.error.empty())
            std::cerr << "solver failure: seed " << r.seed << " " << r.solver.label() << ": "
                      << r.error << '\n';
        return 1;
      }
      return 0;
    }
    if (app.got_subcommand(verify_cmd)) {
      if (verify_seeds < 1) throw wsr::ConfigError("--seeds", "need at least one seed");
      if (verify_users < 1 || verify_antennas < 1)
        throw wsr::ConfigError("--users/--antennas", "must be positive");
      if (verify_users > 8 || verify_antennas > 8)
        throw wsr::ConfigError("--users/--antennas", "identity suite is desk-scale: max 8");
      wsr::IdentitySuiteConfig cfg;
      cfg.seed_count = verify_seeds;
      cfg.miso_users = cfg.mimo_links = verify_users;
      cfg.miso_antennas = cfg.mimo_antennas = verify_antennas;
      cfg.prop_trials = verify_trials;
      cfg.eta_mode =
          verify_eta == "exact" ? wsr::EtaMode::ExactLambdaMax : wsr::EtaMode::FrobeniusBound;
      cfg.inject_map_error = inject_error;
      const auto reports = wsr::run_identity_suite(cfg);
      int failures = 0;
      for (const auto& r : reports) {
        std::cout << wsr::to_json_line(r) << '\n';
        if (!r.pass) ++failures;
      }
      if (failures > 0) {
        std::cerr << failures << " identity check(s) failed\n";
        return 1;
      }
      return 0;
    }
    if (app.got_subcommand(sweep_cmd)) {
      wsr::ExperimentConfig cfg = load_config(config_path);
      apply_overrides(cfg, seeds, out_dir, eta_mode, parallel);
      const auto result = wsr::sweep_experiment(cfg, axis, values);
      const auto j = wsr::to_json(result);
      std::filesystem::create_directories(cfg.out_dir);
      std::ofstream f(std::filesystem::path(cfg.out_dir) / "sweep.json", std::ios::binary);
      f << j.dump(2) << '\n';
      std::cout << j.dump(2) << '\n';
      return 0;
    }
    if (app.got_subcommand(relaxed_cmd)) {
      wsr::ExperimentConfig cfg = load_config(config_path);
      apply_overrides(cfg, seeds, out_dir, eta_mode, parallel);
      const auto result = wsr::relaxed_bisection_study(cfg, thresholds);
      std::filesystem::create_directories(cfg.out_dir);
      for (const auto& run : result.runs) {
        std::ofstream f(std::filesystem::path(cfg.out_dir) / wsr::run_filename(run),
                        std::ios::binary);
        f << wsr::run_to_csv(run);
      }
      std::ofstream f(std::filesystem::path(cfg.out_dir) / "relaxed_summary.json",
                      std::ios::binary);
      f << result.summary.dump(2) << '\n';
      std::cout << result.summary.dump(2) << '\n';
      return 0;
    }
  } catch (const wsr::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
