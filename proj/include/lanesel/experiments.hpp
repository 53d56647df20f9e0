#pragma once

// Experiment harness: sweeps of matched-seed scenario runs, paired deltas
// against the Off baseline, and CSV artifacts.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lanesel/scenario.hpp"

namespace lanesel {

enum class ExperimentId { kCongestionEffect, kSystemEffect, kOdaImpact };

std::string_view to_string(ExperimentId id);
std::optional<ExperimentId> parse_experiment_id(std::string_view s);

struct ExperimentSpec {
  ExperimentId id = ExperimentId::kSystemEffect;
  std::vector<std::uint64_t> seeds;
  ScenarioConfig base;
  // congestion_effect and system_effect sweep densities; oda_impact sweeps
  // budgets at base.density.
  std::vector<DensityLevel> densities;
  std::vector<int> oda_budgets;
  // Worker threads; 0 picks the hardware concurrency.
  unsigned jobs = 0;
};

// The sweep for one experiment with seeds first_seed .. first_seed + n - 1:
//   congestion_effect: {low, medium, high} x {proposed, st_baseline}
//   system_effect:     {low, medium, high} x proposed
//   oda_impact:        budgets {0, 10, ..., 50} at medium density
ExperimentSpec default_spec(ExperimentId id, std::size_t seed_count = 30,
                            std::uint64_t first_seed = 1);

// Throws Error{kInvalidSpec}.
void validate(const ExperimentSpec& spec);

// One scenario run. Off baseline rows have no delta.
struct RunRow {
  std::string experiment_id;
  std::string cell;
  std::uint64_t seed = 0;
  SystemMode mode = SystemMode::kOff;
  double mean_travel_time_s = 0.0;
  std::optional<double> delta_pct;
  std::uint64_t odas_issued = 0;
  std::uint64_t lane_changes = 0;
  std::uint64_t aborts = 0;
  double beacon_delivery_ratio = 0.0;

  friend bool operator==(const RunRow&, const RunRow&) = default;
};

struct SummaryCell {
  std::string experiment_id;
  std::string cell;
  SystemMode mode = SystemMode::kProposed;
  std::size_t n = 0;
  double mean_delta_pct = 0.0;
  double min_delta_pct = 0.0;
  double max_delta_pct = 0.0;
  double se_delta_pct = 0.0;
  double mean_travel_time_s = 0.0;
  double mean_baseline_travel_time_s = 0.0;
  // Paired one-sided test of treatment < Off on travel time.
  double p_value = 1.0;

  friend bool operator==(const SummaryCell&, const SummaryCell&) = default;
};

struct ExperimentSummary {
  std::vector<SummaryCell> cells;

  const SummaryCell* find(std::string_view cell, SystemMode mode) const;
  friend bool operator==(const ExperimentSummary&, const ExperimentSummary&) = default;
};

struct ExperimentResult {
  std::vector<RunRow> rows;
  ExperimentSummary summary;
  std::uint64_t overlap_events = 0;
  std::uint64_t speed_violations = 0;
  int max_odas_per_vehicle = 0;
};

// Cell label for a treatment run, e.g. "high" or "budget=20".
std::string cell_label(const ExperimentSpec& spec, DensityLevel density, int oda_budget);

// Runs every treatment cell and its matched-seed Off baseline. Off runs are
// shared between treatments with the same density. Throws Error{kInvalidSpec}
// or Error{kRunFailure} naming the failing cell and seed.
ExperimentResult run_experiment(const ExperimentSpec& spec);

// Groups treatment rows by (cell, mode) in order of first appearance.
// Pairs each with the Off row of the same experiment, seed, and baseline
// cell. Throws Error{kEmptyInput} when there is no treatment row.
ExperimentSummary aggregate(std::span<const RunRow> rows);

struct PairedTest {
  std::size_t n = 0;
  double mean_diff = 0.0;
  double se = 0.0;
  double t = 0.0;
  // P(T <= t) under H0, i.e. the one-sided p-value for "a < b".
  double p_less = 1.0;
  // Two-sided p-value for "a != b".
  double p_two_sided = 1.0;
};

// Paired Student t test on a - b. Zero-variance differences give p-values
// of 0 or 1 (or 0.5 / 1 when every difference is zero).
// Throws Error{kEmptyInput} for fewer than two pairs or unequal lengths.
PairedTest paired_t_test(std::span<const double> a, std::span<const double> b);

// Sample standard error of the mean (n - 1 denominator); 0 for n < 2.
double standard_error(std::span<const double> xs);

// Columns: experiment_id,cell,seed,mode,mean_travel_time_s,delta_pct,
//          odas_issued,lane_changes,aborts,beacon_delivery_ratio
void write_runs_csv(std::ostream& out, std::span<const RunRow> rows);
// Throws Error{kEmptyInput} on a header mismatch or malformed row.
std::vector<RunRow> read_runs_csv(std::istream& in);

// Columns: experiment_id,cell,mode,n,mean_delta_pct,min_delta_pct,
//          max_delta_pct,se_delta_pct,mean_travel_time_s,
//          mean_baseline_travel_time_s,p_value
void write_summary_csv(std::ostream& out, const ExperimentSummary& summary);

// Long-format rows for external plotting:
//   experiment_id,cell,mode,seed,metric,value
void write_plot_data(std::ostream& out, std::span<const RunRow> rows);

}  // namespace lanesel
