#include "lanesel/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "lanesel/error.hpp"

namespace lanesel {

double bumper_gap(const VehicleState& follower, const VehicleState& leader, const IdmParams& p) {
  return leader.longitudinal_pos_m - p.vehicle_length_m - follower.longitudinal_pos_m;
}

double idm_acceleration(const VehicleState& v, const VehicleState* leader, const IdmParams& p) {
  const double v0 = std::max(v.desired_speed_mps, 1e-6);
  double acc = 1.0 - std::pow(v.speed_mps / v0, p.accel_exponent);
  if (leader != nullptr) {
    const double gap = std::max(bumper_gap(v, *leader, p), 0.01);
    const double dv = v.speed_mps - leader->speed_mps;
    const double s_star =
        p.min_gap_m +
        std::max(0.0, v.speed_mps * p.time_headway_s +
                          v.speed_mps * dv / (2.0 * std::sqrt(p.max_accel_mps2 * p.comfort_decel_mps2)));
    acc -= (s_star / gap) * (s_star / gap);
  }
  return std::clamp(p.max_accel_mps2 * acc, -p.max_decel_mps2, p.max_accel_mps2);
}

VehicleState step_longitudinal(const VehicleState& v, const VehicleState* leader, double dt_s,
                               const IdmParams& p, double accel_cap) {
  const double acc = std::min(idm_acceleration(v, leader, p), accel_cap);
  const double v_cap = std::min(v.desired_speed_mps, kMaxSpeedMps);
  double v_next = std::clamp(v.speed_mps + acc * dt_s, 0.0, std::max(v_cap, 0.0));
  double pos_next = v.longitudinal_pos_m + 0.5 * (v.speed_mps + v_next) * dt_s;

  if (leader != nullptr) {
    const double limit = leader->longitudinal_pos_m - p.vehicle_length_m - p.min_gap_m;
    if (pos_next > limit) {
      pos_next = std::max(v.longitudinal_pos_m, limit);
      // Keep the speed consistent with the shortened trapezoid.
      const double implied = 2.0 * (pos_next - v.longitudinal_pos_m) / dt_s - v.speed_mps;
      v_next = std::clamp(std::min(v_next, implied), 0.0, v_next);
    }
  }

  VehicleState out = v;
  out.speed_mps = v_next;
  out.longitudinal_pos_m = pos_next;
  return out;
}

namespace {

std::vector<int> adjacent_lanes(int lane, const CorridorConfig& corridor) {
  std::vector<int> lanes;
  for (int candidate : {lane - 1, lane + 1}) {
    if (corridor.valid_lane(candidate) && corridor.same_direction(candidate, lane)) {
      lanes.push_back(candidate);
    }
  }
  return lanes;
}

}  // namespace

std::vector<GapDescriptor> sense_choices(const VehicleState& v, std::span<const VehicleState> world,
                                         const CorridorConfig& corridor, const IdmParams& p) {
  std::vector<GapDescriptor> gaps;
  const double lo = std::max(0.0, v.longitudinal_pos_m - corridor.visual_range_m);
  const double hi = std::min(corridor.length_m, v.longitudinal_pos_m + corridor.visual_range_m);
  const double needed = p.vehicle_length_m + 2.0 * p.min_gap_m;
  std::uint32_t next_id = 1;

  for (int lane : adjacent_lanes(v.lane_index, corridor)) {
    std::vector<double> fronts;
    for (const auto& other : world) {
      if (other.elp != v.elp && other.lane_index == lane) fronts.push_back(other.longitudinal_pos_m);
    }
    std::sort(fronts.begin(), fronts.end());

    // Walk the free intervals between consecutive bodies, clipped to sight.
    double free_start = lo;
    auto emit = [&](double free_end) {
      const double a = std::max(free_start, lo);
      const double b = std::min(free_end, hi);
      if (b - a >= needed) {
        gaps.push_back({.choice_id = next_id++,
                        .lane_index = lane,
                        .center_pos = corridor.to_grid(lane, 0.5 * (a + b)),
                        .length_m = b - a});
      }
    };
    for (double front : fronts) {
      const double rear = front - p.vehicle_length_m;
      if (rear > free_start) emit(rear);
      free_start = std::max(free_start, front);
    }
    emit(hi);
  }
  return gaps;
}

double visible_downstream_density(const VehicleState& v, int lane,
                                  std::span<const VehicleState> world,
                                  const CorridorConfig& corridor) {
  const double lo = v.longitudinal_pos_m;
  const double hi = lo + corridor.visual_range_m;
  int count = 0;
  for (const auto& other : world) {
    if (other.elp == v.elp || other.lane_index != lane) continue;
    if (other.longitudinal_pos_m > lo && other.longitudinal_pos_m <= hi) ++count;
  }
  return count / corridor.visual_range_m;
}

std::optional<int> baseline_lane_decision(const VehicleState& v,
                                          std::span<const GapDescriptor> choices,
                                          std::span<const VehicleState> world,
                                          const CorridorConfig& corridor, double hysteresis) {
  if (choices.empty()) return std::nullopt;
  std::vector<int> lanes;
  for (const auto& g : choices) lanes.push_back(g.lane_index);
  std::sort(lanes.begin(), lanes.end());
  lanes.erase(std::unique(lanes.begin(), lanes.end()), lanes.end());

  const double current = visible_downstream_density(v, v.lane_index, world, corridor);
  std::optional<int> best;
  double best_density = 0.0;
  for (int lane : lanes) {
    if (lane == v.lane_index || !corridor.same_direction(lane, v.lane_index)) continue;
    const double d = visible_downstream_density(v, lane, world, corridor);
    if (!best || d < best_density) {
      best = lane;
      best_density = d;
    }
  }
  if (!best || current <= 0.0) return std::nullopt;
  if (best_density <= current * (1.0 - hysteresis)) return best;
  return std::nullopt;
}

std::optional<int> assisted_lane_decision(const VehicleState& v, const OdaResponse& advice,
                                          std::uint64_t now_ms, std::uint64_t staleness_ms) {
  if (now_ms > advice.issued_at_ms + staleness_ms) {
    throw Error(ErrorCode::kStaleAdvice, "advice issued at " + std::to_string(advice.issued_at_ms) +
                                             " ms is stale at " + std::to_string(now_ms) + " ms");
  }
  for (const auto& verdict : advice.verdicts) {
    if (verdict.decision != Decision::kPreferred) continue;
    if (verdict.lane_index == v.lane_index) return std::nullopt;
    return verdict.lane_index;
  }
  return std::nullopt;
}

LaneChangeResult execute_lane_change(const VehicleState& v, int target_lane,
                                     std::span<const VehicleState> world,
                                     const CorridorConfig& corridor, const IdmParams& p) {
  if (!corridor.valid_lane(target_lane) || std::abs(target_lane - v.lane_index) != 1 ||
      !corridor.same_direction(target_lane, v.lane_index)) {
    return {v, LaneChangeStatus::kRejected};
  }

  const VehicleState* leader = nullptr;
  const VehicleState* follower = nullptr;
  for (const auto& other : world) {
    if (other.elp == v.elp || other.lane_index != target_lane) continue;
    if (other.longitudinal_pos_m >= v.longitudinal_pos_m) {
      if (!leader || other.longitudinal_pos_m < leader->longitudinal_pos_m) leader = &other;
    } else if (!follower || other.longitudinal_pos_m > follower->longitudinal_pos_m) {
      follower = &other;
    }
  }

  VehicleState moved = v;
  moved.lane_index = target_lane;
  if (leader) {
    if (bumper_gap(moved, *leader, p) < p.min_gap_m ||
        idm_acceleration(moved, leader, p) < -p.safe_decel_mps2) {
      return {v, LaneChangeStatus::kAborted};
    }
  }
  if (follower) {
    if (bumper_gap(*follower, moved, p) < p.min_gap_m ||
        idm_acceleration(*follower, &moved, p) < -p.safe_decel_mps2) {
      return {v, LaneChangeStatus::kAborted};
    }
  }
  return {moved, LaneChangeStatus::kExecuted};
}

}  // namespace lanesel
