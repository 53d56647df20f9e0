// Command-line front end: single runs, the three experiment sweeps, config
// validation and plot-ready CSV export.
//
// Exit codes: 0 success, 1 invalid input, 2 run failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "lanesel/error.hpp"
#include "lanesel/experiments.hpp"
#include "lanesel/scenario.hpp"
#include "lanesel/sim_engine.hpp"

namespace fs = std::filesystem;
using namespace lanesel;

namespace {

constexpr int kExitInvalid = 1;
constexpr int kExitRunFailure = 2;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<std::string> density;
  std::optional<int> oda_budget;
  std::optional<double> tx_range;

  void add_to(CLI::App* app, bool with_mode) {
    app->add_option("--seed", seed, "Random seed (first seed for sweeps)");
    if (with_mode) app->add_option("--mode", mode, "off | proposed | st_baseline");
    app->add_option("--density", density, "low | medium | high");
    app->add_option("--oda-budget", oda_budget, "ODAs per vehicle per run, 0..50");
    app->add_option("--tx-range", tx_range, "Transmission range in metres (300 or 500)");
  }

  void apply(ScenarioConfig& cfg) const {
    if (seed) cfg.seed = *seed;
    if (mode) {
      const auto m = parse_mode(*mode);
      if (!m) throw Error(ErrorCode::kInvalidConfig, "unknown mode '" + *mode + "'");
      cfg.mode = *m;
    }
    if (density) {
      const auto d = parse_density(*density);
      if (!d) throw Error(ErrorCode::kInvalidConfig, "unknown density '" + *density + "'");
      cfg.density = *d;
    }
    if (oda_budget) cfg.oda_budget = *oda_budget;
    if (tx_range) cfg.channel.tx_range_m = *tx_range;
  }
};

std::ofstream open_output(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream out(dir / name);
  if (!out) throw Error(ErrorCode::kInvalidConfig, "cannot write " + (dir / name).string());
  return out;
}

int exit_code_for(const Error& e) {
  return e.code() == ErrorCode::kRunFailure ? kExitRunFailure : kExitInvalid;
}

int cmd_run(const std::string& config_path, const Overrides& ov, const std::string& out_dir) {
  ScenarioConfig cfg = load_config_file(config_path);
  ov.apply(cfg);
  validate(cfg);
  RunMetrics m;
  try {
    m = run_scenario(cfg);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidConfig) throw;
    throw Error(ErrorCode::kRunFailure, e.what());
  }
  if (out_dir.empty()) {
    write_run_csv(std::cout, m);
  } else {
    auto out = open_output(out_dir, "run.csv");
    write_run_csv(out, m);
    std::printf("mode=%s density=%s seed=%llu traversals=%zu mean_travel_time_s=%.3f odas=%llu\n",
                std::string(to_string(cfg.mode)).c_str(), std::string(to_string(cfg.density)).c_str(),
                static_cast<unsigned long long>(cfg.seed), m.traversals.size(), m.mean_travel_time_s,
                static_cast<unsigned long long>(m.odas_issued));
  }
  return 0;
}

int cmd_experiment(const std::string& id_text, std::size_t seeds, const std::string& config_path,
                   const Overrides& ov, unsigned jobs, const std::string& out_dir) {
  const auto id = parse_experiment_id(id_text);
  if (!id) throw Error(ErrorCode::kInvalidSpec, "unknown experiment '" + id_text + "'");
  ExperimentSpec spec = default_spec(*id, seeds, ov.seed.value_or(1));
  if (!config_path.empty()) spec.base = load_config_file(config_path);
  Overrides base_ov = ov;
  base_ov.seed.reset();
  base_ov.apply(spec.base);
  if (ov.density && *id != ExperimentId::kOdaImpact) spec.densities = {spec.base.density};
  if (ov.oda_budget && *id == ExperimentId::kOdaImpact) spec.oda_budgets = {*ov.oda_budget};
  spec.jobs = jobs;

  const ExperimentResult result = run_experiment(spec);
  {
    auto runs = open_output(out_dir, "runs.csv");
    write_runs_csv(runs, result.rows);
    auto summary = open_output(out_dir, "summary.csv");
    write_summary_csv(summary, result.summary);
  }
  std::printf("%-20s %-12s %4s %10s %8s %8s %8s %10s\n", "cell", "mode", "n", "mean_d%", "se", "min",
              "max", "p(less)");
  for (const auto& c : result.summary.cells) {
    std::printf("%-20s %-12s %4zu %10.3f %8.3f %8.3f %8.3f %10.4g\n", c.cell.c_str(),
                std::string(to_string(c.mode)).c_str(), c.n, c.mean_delta_pct, c.se_delta_pct,
                c.min_delta_pct, c.max_delta_pct, c.p_value);
  }
  std::printf("overlaps=%llu speed_violations=%llu (st_baseline is a simplified cell-density stand-in)\n",
              static_cast<unsigned long long>(result.overlap_events),
              static_cast<unsigned long long>(result.speed_violations));
  return 0;
}

int cmd_validate(const std::string& config_path) {
  const ScenarioConfig cfg = load_config_file(config_path);
  validate(cfg);
  std::printf("%s: valid (%d vehicles, mode %s)\n", config_path.c_str(), vehicle_count(cfg),
              std::string(to_string(cfg.mode)).c_str());
  return 0;
}

int cmd_plot_data(const std::string& runs_path, const std::string& out_dir) {
  std::ifstream in(runs_path);
  if (!in) throw Error(ErrorCode::kEmptyInput, "cannot read " + runs_path);
  const auto rows = read_runs_csv(in);
  if (out_dir.empty()) {
    write_plot_data(std::cout, rows);
  } else {
    auto out = open_output(out_dir, "plot_data.csv");
    write_plot_data(out, rows);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lane-selection assistance simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir, experiment_id, runs_path;
  std::size_t seeds = 30;
  unsigned jobs = 0;
  Overrides run_ov, exp_ov;

  auto* run = app.add_subcommand("run", "Run one scenario from a config file");
  run->add_option("config", config_path, "Scenario config file")->required();
  run->add_option("--out-dir", out_dir, "Write run.csv here instead of stdout");
  run_ov.add_to(run, true);

  auto* exp = app.add_subcommand("experiment", "Run an experiment sweep");
  exp->add_option("id", experiment_id, "congestion_effect | system_effect | oda_impact")->required();
  exp->add_option("--seeds", seeds, "Number of matched seeds per cell")->check(CLI::Range(2, 1000000));
  exp->add_option("--config", config_path, "Base scenario config file");
  exp->add_option("--jobs", jobs, "Worker threads (0 = all cores)");
  exp->add_option("--out-dir", out_dir, "Directory for runs.csv and summary.csv")->default_val(".");
  exp_ov.add_to(exp, false);

  auto* val = app.add_subcommand("validate-config", "Check a scenario config file");
  val->add_option("config", config_path, "Scenario config file")->required();

  auto* plot = app.add_subcommand("plot-data", "Tidy long-format CSV from a runs.csv");
  plot->add_option("runs", runs_path, "runs.csv from an experiment")->required();
  plot->add_option("--out-dir", out_dir, "Write plot_data.csv here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInvalid;
  }

  try {
    if (*run) return cmd_run(config_path, run_ov, out_dir);
    if (*exp) return cmd_experiment(experiment_id, seeds, config_path, exp_ov, jobs, out_dir);
    if (*val) return cmd_validate(config_path);
    if (*plot) return cmd_plot_data(runs_path, out_dir);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRunFailure;
  }
  return 0;
}
