#pragma once

// Microscopic vehicle dynamics on the two-way corridor: IDM car following,
// the sight-limited baseline lane choice, and execution of RSU advice.

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "lanesel/corridor.hpp"
#include "lanesel/oda.hpp"

namespace lanesel {

inline constexpr int kMaxOdaBudget = 50;
inline constexpr double kMinDesiredSpeedMps = 15.0;
inline constexpr double kMaxDesiredSpeedMps = 45.0;

struct IdmParams {
  double max_accel_mps2 = 1.5;
  double comfort_decel_mps2 = 2.0;
  double time_headway_s = 1.2;
  double min_gap_m = 2.0;
  double accel_exponent = 4.0;
  // Physical braking limit.
  double max_decel_mps2 = 9.0;
  double vehicle_length_m = 5.0;
  // Lane-change safety: neither the ego nor its new follower may need to
  // brake harder than this after the change.
  double safe_decel_mps2 = 4.0;
};

enum class DriveMode { kBaseline, kAssisted, kStBaseline };

enum class DriverProfile { kCalm, kErratic };

struct VehicleState {
  std::uint64_t elp = 0;
  int lane_index = 0;
  // Front bumper, measured along the direction of travel from the entrance.
  double longitudinal_pos_m = 0.0;
  double speed_mps = 0.0;
  double desired_speed_mps = kMinDesiredSpeedMps;
  DriveMode mode = DriveMode::kBaseline;
  int oda_budget_remaining = 0;
  std::optional<OdaResponse> pending_advice;
  DriverProfile profile = DriverProfile::kCalm;
};

// Gap between the ego's front bumper and the leader's rear bumper.
double bumper_gap(const VehicleState& follower, const VehicleState& leader, const IdmParams& p);

// IDM acceleration, clamped to [-max_decel, max_accel].
double idm_acceleration(const VehicleState& v, const VehicleState* leader, const IdmParams& p);

// Advances one vehicle by dt_s. Speed stays in [0, desired]; the position is
// integrated with the trapezoid rule and never closes the gap to the
// leader's current rear bumper below min_gap. accel_cap lets a caller impose
// a harder deceleration than IDM would choose.
VehicleState step_longitudinal(const VehicleState& v, const VehicleState* leader, double dt_s,
                               const IdmParams& p,
                               double accel_cap = std::numeric_limits<double>::infinity());

// Free spaces in the adjacent same-direction lanes within visual range of
// the ego that are long enough for a vehicle plus min_gap at each end.
// Ordered by lane, then position along the lane; choice ids count from 1.
std::vector<GapDescriptor> sense_choices(const VehicleState& v, std::span<const VehicleState> world,
                                         const CorridorConfig& corridor, const IdmParams& p);

// Vehicles per metre in (pos, pos + visual_range] of a lane, excluding the ego.
double visible_downstream_density(const VehicleState& v, int lane,
                                  std::span<const VehicleState> world,
                                  const CorridorConfig& corridor);

inline constexpr double kDefaultHysteresis = 0.1;

// Myopic choice: the candidate lane with the lowest visible downstream
// density, taken only if it undercuts the current lane's by the hysteresis
// margin. Lane ties go to the lower index.
std::optional<int> baseline_lane_decision(const VehicleState& v,
                                          std::span<const GapDescriptor> choices,
                                          std::span<const VehicleState> world,
                                          const CorridorConfig& corridor,
                                          double hysteresis = kDefaultHysteresis);

inline constexpr std::uint64_t kDefaultAdviceStalenessMs = 500;

// Lane of the top-ranked Preferred verdict, or nothing. Throws
// Error{kStaleAdvice} if the advice is older than staleness_ms.
std::optional<int> assisted_lane_decision(const VehicleState& v, const OdaResponse& advice,
                                          std::uint64_t now_ms,
                                          std::uint64_t staleness_ms = kDefaultAdviceStalenessMs);

enum class LaneChangeStatus { kExecuted, kAborted, kRejected };

struct LaneChangeResult {
  VehicleState state;
  LaneChangeStatus status = LaneChangeStatus::kRejected;
};

// Moves the ego one lane over if the target gap is still acceptable.
// Rejected: target not adjacent or in the other direction. Aborted: the gap
// closed. In both cases the state is returned unchanged.
LaneChangeResult execute_lane_change(const VehicleState& v, int target_lane,
                                     std::span<const VehicleState> world,
                                     const CorridorConfig& corridor, const IdmParams& p);

}  // namespace lanesel
