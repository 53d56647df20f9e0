#include "lanesel/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "lanesel/error.hpp"
#include "lanesel/sim_engine.hpp"

namespace lanesel {

std::string_view to_string(ExperimentId id) {
  switch (id) {
    case ExperimentId::kCongestionEffect: return "congestion_effect";
    case ExperimentId::kSystemEffect: return "system_effect";
    case ExperimentId::kOdaImpact: return "oda_impact";
  }
  return "?";
}

std::optional<ExperimentId> parse_experiment_id(std::string_view s) {
  if (s == "congestion_effect") return ExperimentId::kCongestionEffect;
  if (s == "system_effect") return ExperimentId::kSystemEffect;
  if (s == "oda_impact") return ExperimentId::kOdaImpact;
  return std::nullopt;
}

ExperimentSpec default_spec(ExperimentId id, std::size_t seed_count, std::uint64_t first_seed) {
  ExperimentSpec spec;
  spec.id = id;
  for (std::size_t i = 0; i < seed_count; ++i) spec.seeds.push_back(first_seed + i);
  if (id == ExperimentId::kOdaImpact) {
    spec.base.density = DensityLevel::kMedium;
    spec.oda_budgets = {0, 10, 20, 30, 40, 50};
  } else {
    spec.densities = {DensityLevel::kLow, DensityLevel::kMedium, DensityLevel::kHigh};
  }
  return spec;
}

void validate(const ExperimentSpec& spec) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidSpec, what); };
  if (spec.seeds.size() < 2) fail("at least two seeds are required");
  if (std::set<std::uint64_t>(spec.seeds.begin(), spec.seeds.end()).size() != spec.seeds.size()) {
    fail("seeds must be distinct");
  }
  if (spec.id == ExperimentId::kOdaImpact) {
    if (spec.oda_budgets.empty()) fail("oda_impact needs at least one budget");
    for (int b : spec.oda_budgets) {
      if (b < 0 || b > kMaxOdaBudget) fail("oda budget " + std::to_string(b) + " outside [0, 50]");
    }
  } else if (spec.densities.empty()) {
    fail(std::string(to_string(spec.id)) + " needs at least one density");
  }
  try {
    validate(spec.base);
  } catch (const Error& e) {
    fail(std::string("base config: ") + e.what());
  }
}

const SummaryCell* ExperimentSummary::find(std::string_view cell, SystemMode mode) const {
  for (const auto& c : cells) {
    if (c.cell == cell && c.mode == mode) return &c;
  }
  return nullptr;
}

std::string cell_label(const ExperimentSpec& spec, DensityLevel density, int oda_budget) {
  std::string label(to_string(density));
  if (spec.id == ExperimentId::kOdaImpact) label += "/budget=" + std::to_string(oda_budget);
  return label;
}

namespace {

// Off rows are labelled with the density alone; a treatment cell's baseline
// is its label up to the first '/'.
std::string baseline_cell(const std::string& cell) { return cell.substr(0, cell.find('/')); }

struct Job {
  std::string cell;
  ScenarioConfig cfg;
};

std::vector<SystemMode> treatments(ExperimentId id) {
  if (id == ExperimentId::kCongestionEffect) return {SystemMode::kProposed, SystemMode::kStBaseline};
  return {SystemMode::kProposed};
}

RunRow make_row(const ExperimentSpec& spec, const Job& job, const RunMetrics& m) {
  RunRow row;
  row.experiment_id = std::string(to_string(spec.id));
  row.cell = job.cell;
  row.seed = job.cfg.seed;
  row.mode = job.cfg.mode;
  row.mean_travel_time_s = m.mean_travel_time_s;
  row.odas_issued = m.odas_issued;
  row.lane_changes = m.lane_changes_executed;
  row.aborts = m.lane_changes_aborted;
  row.beacon_delivery_ratio = m.beacon_delivery_ratio;
  return row;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <typename T>
T parse_field(const std::string& s, std::size_t line_no) {
  T value{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kEmptyInput,
                "runs CSV line " + std::to_string(line_no) + ": bad value '" + s + "'");
  }
  return value;
}

constexpr std::string_view kRunsHeader =
    "experiment_id,cell,seed,mode,mean_travel_time_s,delta_pct,odas_issued,lane_changes,aborts,"
    "beacon_delivery_ratio";

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  validate(spec);

  // Baselines first, then treatments, each in sweep then seed order.
  std::vector<Job> jobs;
  std::vector<DensityLevel> densities = spec.densities;
  if (spec.id == ExperimentId::kOdaImpact) densities = {spec.base.density};
  for (DensityLevel d : densities) {
    for (auto seed : spec.seeds) {
      Job job{std::string(to_string(d)), spec.base};
      job.cfg.density = d;
      job.cfg.seed = seed;
      job.cfg.mode = SystemMode::kOff;
      jobs.push_back(std::move(job));
    }
  }
  const std::size_t baseline_jobs = jobs.size();
  std::vector<int> budgets = spec.oda_budgets;
  if (spec.id != ExperimentId::kOdaImpact) budgets = {spec.base.oda_budget};
  for (SystemMode mode : treatments(spec.id)) {
    for (DensityLevel d : densities) {
      for (int budget : budgets) {
        for (auto seed : spec.seeds) {
          Job job{cell_label(spec, d, budget), spec.base};
          job.cfg.density = d;
          job.cfg.seed = seed;
          job.cfg.mode = mode;
          job.cfg.oda_budget = budget;
          jobs.push_back(std::move(job));
        }
      }
    }
  }

  std::vector<RunMetrics> metrics(jobs.size());
  std::vector<std::string> failures(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        metrics[i] = run_scenario(jobs[i].cfg);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  unsigned threads = spec.jobs ? spec.jobs : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (!failures[i].empty()) {
      throw Error(ErrorCode::kRunFailure, "cell " + jobs[i].cell + " mode " +
                                              std::string(to_string(jobs[i].cfg.mode)) + " seed " +
                                              std::to_string(jobs[i].cfg.seed) + ": " + failures[i]);
    }
  }

  ExperimentResult result;
  std::map<std::pair<std::string, std::uint64_t>, std::size_t> baseline_of;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    RunRow row = make_row(spec, jobs[i], metrics[i]);
    if (i < baseline_jobs) {
      baseline_of[{jobs[i].cell, jobs[i].cfg.seed}] = i;
    } else {
      const std::size_t b = baseline_of.at({baseline_cell(jobs[i].cell), jobs[i].cfg.seed});
      try {
        row.delta_pct = travel_time_delta_pct(metrics[i], metrics[b]);
      } catch (const Error& e) {
        throw Error(ErrorCode::kRunFailure, "cell " + jobs[i].cell + " seed " +
                                                std::to_string(jobs[i].cfg.seed) + ": " + e.what());
      }
    }
    result.rows.push_back(std::move(row));
    result.overlap_events += metrics[i].audit.overlap_events;
    result.speed_violations += metrics[i].audit.speed_violations;
    result.max_odas_per_vehicle = std::max(result.max_odas_per_vehicle, metrics[i].max_odas_per_vehicle);
  }
  result.summary = aggregate(result.rows);
  return result;
}

double standard_error(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double n = static_cast<double>(xs.size());
  return std::sqrt(ss / (n - 1.0) / n);
}

PairedTest paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw Error(ErrorCode::kEmptyInput, "paired test needs two or more equal-length samples");
  }
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  PairedTest r;
  r.n = d.size();
  for (double x : d) r.mean_diff += x;
  r.mean_diff /= static_cast<double>(r.n);
  r.se = standard_error(d);
  if (r.se == 0.0) {
    if (r.mean_diff == 0.0) {
      r.p_less = 0.5;
      r.p_two_sided = 1.0;
    } else {
      r.t = r.mean_diff > 0.0 ? INFINITY : -INFINITY;
      r.p_less = r.mean_diff < 0.0 ? 0.0 : 1.0;
      r.p_two_sided = 0.0;
    }
    return r;
  }
  r.t = r.mean_diff / r.se;
  const boost::math::students_t dist(static_cast<double>(r.n - 1));
  r.p_less = boost::math::cdf(dist, r.t);
  r.p_two_sided = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t)));
  return r;
}

ExperimentSummary aggregate(std::span<const RunRow> rows) {
  std::map<std::tuple<std::string, std::string, std::uint64_t>, const RunRow*> baselines;
  for (const auto& row : rows) {
    if (row.mode == SystemMode::kOff) baselines[{row.experiment_id, row.cell, row.seed}] = &row;
  }

  struct Group {
    SummaryCell cell;
    std::vector<double> deltas, treated, base;
  };
  std::vector<Group> groups;
  for (const auto& row : rows) {
    if (row.mode == SystemMode::kOff) continue;
    auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) {
      return g.cell.experiment_id == row.experiment_id && g.cell.cell == row.cell &&
             g.cell.mode == row.mode;
    });
    if (it == groups.end()) {
      groups.push_back({});
      it = std::prev(groups.end());
      it->cell.experiment_id = row.experiment_id;
      it->cell.cell = row.cell;
      it->cell.mode = row.mode;
    }
    const auto b = baselines.find({row.experiment_id, baseline_cell(row.cell), row.seed});
    if (b == baselines.end() || !row.delta_pct) {
      throw Error(ErrorCode::kEmptyInput, "cell " + row.cell + " seed " + std::to_string(row.seed) +
                                              " has no matched Off run");
    }
    it->deltas.push_back(*row.delta_pct);
    it->treated.push_back(row.mean_travel_time_s);
    it->base.push_back(b->second->mean_travel_time_s);
  }
  if (groups.empty()) throw Error(ErrorCode::kEmptyInput, "no treatment runs to aggregate");

  ExperimentSummary summary;
  for (auto& g : groups) {
    SummaryCell& c = g.cell;
    c.n = g.deltas.size();
    double sum = 0.0, tsum = 0.0, bsum = 0.0;
    for (std::size_t i = 0; i < c.n; ++i) {
      sum += g.deltas[i];
      tsum += g.treated[i];
      bsum += g.base[i];
    }
    const double n = static_cast<double>(c.n);
    c.mean_delta_pct = sum / n;
    c.min_delta_pct = *std::min_element(g.deltas.begin(), g.deltas.end());
    c.max_delta_pct = *std::max_element(g.deltas.begin(), g.deltas.end());
    c.se_delta_pct = standard_error(g.deltas);
    c.mean_travel_time_s = tsum / n;
    c.mean_baseline_travel_time_s = bsum / n;
    c.p_value = c.n >= 2 ? paired_t_test(g.treated, g.base).p_less : 1.0;
    summary.cells.push_back(std::move(c));
  }
  return summary;
}

void write_runs_csv(std::ostream& out, std::span<const RunRow> rows) {
  std::string buf(kRunsHeader);
  buf += '\n';
  for (const auto& r : rows) {
    buf += r.experiment_id + "," + r.cell + "," + std::to_string(r.seed) + "," +
           std::string(to_string(r.mode)) + "," + format_double(r.mean_travel_time_s) + "," +
           (r.delta_pct ? format_double(*r.delta_pct) : std::string()) + "," +
           std::to_string(r.odas_issued) + "," + std::to_string(r.lane_changes) + "," +
           std::to_string(r.aborts) + "," + format_double(r.beacon_delivery_ratio) + "\n";
  }
  out << buf;
}

std::vector<RunRow> read_runs_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kRunsHeader) {
    throw Error(ErrorCode::kEmptyInput, "runs CSV header mismatch");
  }
  std::vector<RunRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 10) {
      throw Error(ErrorCode::kEmptyInput, "runs CSV line " + std::to_string(line_no) + ": expected 10 fields");
    }
    RunRow r;
    r.experiment_id = f[0];
    r.cell = f[1];
    r.seed = parse_field<std::uint64_t>(f[2], line_no);
    const auto mode = parse_mode(f[3]);
    if (!mode) throw Error(ErrorCode::kEmptyInput, "runs CSV line " + std::to_string(line_no) + ": bad mode");
    r.mode = *mode;
    r.mean_travel_time_s = parse_field<double>(f[4], line_no);
    if (!f[5].empty()) r.delta_pct = parse_field<double>(f[5], line_no);
    r.odas_issued = parse_field<std::uint64_t>(f[6], line_no);
    r.lane_changes = parse_field<std::uint64_t>(f[7], line_no);
    r.aborts = parse_field<std::uint64_t>(f[8], line_no);
    r.beacon_delivery_ratio = parse_field<double>(f[9], line_no);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_summary_csv(std::ostream& out, const ExperimentSummary& summary) {
  std::string buf =
      "experiment_id,cell,mode,n,mean_delta_pct,min_delta_pct,max_delta_pct,se_delta_pct,"
      "mean_travel_time_s,mean_baseline_travel_time_s,p_value\n";
  for (const auto& c : summary.cells) {
    buf += c.experiment_id + "," + c.cell + "," + std::string(to_string(c.mode)) + "," +
           std::to_string(c.n) + "," + format_double(c.mean_delta_pct) + "," +
           format_double(c.min_delta_pct) + "," + format_double(c.max_delta_pct) + "," +
           format_double(c.se_delta_pct) + "," + format_double(c.mean_travel_time_s) + "," +
           format_double(c.mean_baseline_travel_time_s) + "," + format_double(c.p_value) + "\n";
  }
  out << buf;
}

void write_plot_data(std::ostream& out, std::span<const RunRow> rows) {
  std::string buf = "experiment_id,cell,mode,seed,metric,value\n";
  for (const auto& r : rows) {
    const std::string prefix = r.experiment_id + "," + r.cell + "," + std::string(to_string(r.mode)) +
                               "," + std::to_string(r.seed) + ",";
    buf += prefix + "mean_travel_time_s," + format_double(r.mean_travel_time_s) + "\n";
    if (r.delta_pct) buf += prefix + "delta_pct," + format_double(*r.delta_pct) + "\n";
    buf += prefix + "odas_issued," + std::to_string(r.odas_issued) + "\n";
    buf += prefix + "lane_changes," + std::to_string(r.lane_changes) + "\n";
    buf += prefix + "aborts," + std::to_string(r.aborts) + "\n";
    buf += prefix + "beacon_delivery_ratio," + format_double(r.beacon_delivery_ratio) + "\n";
  }
  out << buf;
}

}  // namespace lanesel
