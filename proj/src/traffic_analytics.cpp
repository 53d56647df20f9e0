#include "lanesel/traffic_analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "lanesel/error.hpp"

namespace lanesel {

SpeedWindow::SpeedWindow(std::size_t capacity, std::uint64_t max_age_ms)
    : capacity_(capacity), max_age_ms_(max_age_ms) {
  if (capacity_ == 0) throw Error(ErrorCode::kInvalidField, "speed window capacity must be > 0");
}

void SpeedWindow::push(SpeedSample sample) {
  if (!samples_.empty() && sample.timestamp_ms <= samples_.back().timestamp_ms) {
    throw Error(ErrorCode::kInvalidField, "speed window timestamps must strictly increase");
  }
  const double magnitude = std::abs(sample.speed_mps);
  if (!std::isfinite(magnitude) || magnitude > kMaxSpeedMps) {
    throw Error(ErrorCode::kInvalidField,
                "speed " + std::to_string(sample.speed_mps) + " outside [0, 45] m/s");
  }
  sample.speed_mps = magnitude;
  samples_.push_back(sample);
  if (samples_.size() > capacity_) samples_.pop_front();
  evict_older_than(sample.timestamp_ms);
}

void SpeedWindow::evict_older_than(std::uint64_t now_ms) {
  while (!samples_.empty() && samples_.front().timestamp_ms + max_age_ms_ < now_ms) {
    samples_.pop_front();
  }
}

double compute_acs(const SpeedWindow& window) {
  if (window.empty()) throw Error(ErrorCode::kEmptyWindow, "no speed samples");
  double sum = 0.0;
  for (const auto& s : window.samples()) sum += s.speed_mps;
  return sum / static_cast<double>(window.size());
}

double compute_aavs(const FleetSnapshot& fleet) {
  if (fleet.empty()) throw Error(ErrorCode::kEmptyFleet, "no vehicles in snapshot");
  double sum = 0.0;
  for (const auto& v : fleet.vehicles) sum += v.acs_mps;
  return sum / static_cast<double>(fleet.size());
}

bool analyse_speed(double acs_mps, double aavs_mps) { return acs_mps > aavs_mps; }

void SuddenEventCounts::accumulate(const TrajectoryPoint& prev, const TrajectoryPoint& next,
                                   const SuddenEventConfig& cfg) {
  if (next.timestamp_ms <= prev.timestamp_ms) {
    throw Error(ErrorCode::kInvalidField, "trajectory timestamps must strictly increase");
  }
  ++n;
  if (prev.speed_mps <= cfg.high_speed_mps) return;
  const double dt_s = static_cast<double>(next.timestamp_ms - prev.timestamp_ms) / 1000.0;
  const double decel = (prev.speed_mps - next.speed_mps) / dt_s;
  if (decel >= cfg.brake_decel_mps2) ++sud_brk;
  if (next.lane_index != prev.lane_index) ++chg_loc;
}

SuddenEventCounts detect_sudden_events(std::span<const TrajectoryPoint> trajectory,
                                       const SuddenEventConfig& cfg) {
  if (trajectory.size() < 2) {
    throw Error(ErrorCode::kTooShort, "need at least two trajectory points");
  }
  SuddenEventCounts counts;
  for (std::size_t i = 1; i < trajectory.size(); ++i) {
    counts.accumulate(trajectory[i - 1], trajectory[i], cfg);
  }
  return counts;
}

AvSudClass classify_avsud(double value, double threshold) {
  return value >= threshold ? AvSudClass::kHigh : AvSudClass::kLow;
}

AvSudScore compute_avsud(const SuddenEventCounts& counts, double threshold) {
  if (counts.n == 0) throw Error(ErrorCode::kZeroObservations, "n == 0");
  const double n = static_cast<double>(counts.n);
  AvSudScore score;
  // sud_brk / n + chg_loc / n, as one correctly rounded division so the
  // class agrees with the exact rational at the threshold.
  score.value = static_cast<double>(counts.sud_brk + counts.chg_loc) / n;
  score.cls = classify_avsud(score.value, threshold);
  return score;
}

Decision decide(bool faster, AvSudClass avsud_class) {
  if (!faster) return Decision::kNotPreferred;
  return avsud_class == AvSudClass::kHigh ? Decision::kNotPreferredDanger : Decision::kPreferred;
}

namespace {

int decision_rank(Decision d) {
  switch (d) {
    case Decision::kPreferred: return 0;
    case Decision::kNotPreferred: return 1;
    case Decision::kNotPreferredDanger: return 2;
  }
  return 3;
}

}  // namespace

std::vector<ChoiceVerdict> rank_choices(std::vector<ChoiceVerdict> verdicts, int decider_lane) {
  std::stable_sort(verdicts.begin(), verdicts.end(),
                   [decider_lane](const ChoiceVerdict& a, const ChoiceVerdict& b) {
                     const int ra = decision_rank(a.decision);
                     const int rb = decision_rank(b.decision);
                     if (ra != rb) return ra < rb;
                     const int da = std::abs(a.lane_index - decider_lane);
                     const int db = std::abs(b.lane_index - decider_lane);
                     if (da != db) return da < db;
                     return a.choice_id < b.choice_id;
                   });
  return verdicts;
}

}  // namespace lanesel
