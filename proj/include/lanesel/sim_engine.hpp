#pragma once

// Seeded scenario runner. One run advances a fixed 100 ms tick; inside each
// tick the four 25 ms TDMA frames are resolved in order, then lane
// decisions are taken from the frozen start-of-tick state, then every
// vehicle is stepped, then lane changes are executed one vehicle at a time in
// ELP order.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "lanesel/mobility.hpp"
#include "lanesel/radio_channel.hpp"
#include "lanesel/scenario.hpp"

namespace lanesel {

inline constexpr double kTickSeconds = 0.1;
inline constexpr std::uint64_t kTickMs = 100;

struct SpawnedVehicle {
  VehicleState state;
  double entry_time_s = 0.0;

  friend bool operator==(const SpawnedVehicle& a, const SpawnedVehicle& b) {
    return a.entry_time_s == b.entry_time_s && a.state.elp == b.state.elp &&
           a.state.lane_index == b.state.lane_index &&
           a.state.desired_speed_mps == b.state.desired_speed_mps &&
           a.state.profile == b.state.profile && a.state.mode == b.state.mode &&
           a.state.oda_budget_remaining == b.state.oda_budget_remaining;
  }
};

// Exactly vehicle_count(cfg) vehicles, alternating direction, lane uniform
// within the direction, desired speed uniform in the configured range,
// entry time uniform in [0, entry_window_s].
std::vector<SpawnedVehicle> spawn_vehicles(const ScenarioConfig& cfg, Rng& rng);

// RSUs on the median, evenly spaced at most 2 * (tx_range - 50 m) apart so
// every corridor point is within tx_range of one.
std::vector<RsuSite> place_rsus(const CorridorConfig& corridor, const ChannelConfig& channel);

struct Traversal {
  std::uint64_t elp = 0;
  int entry_lane = 0;
  double entry_time_s = 0.0;
  double exit_time_s = 0.0;

  double travel_time_s() const { return exit_time_s - entry_time_s; }
};

struct SafetyAudit {
  std::uint64_t ticks_checked = 0;
  std::uint64_t overlap_events = 0;
  std::uint64_t speed_violations = 0;

  // Counts same-lane pairs closer than min_gap (bumper to bumper) and speeds
  // outside [0, 45] m/s.
  void check(std::span<const VehicleState> world, const IdmParams& idm);
};

struct RunMetrics {
  std::vector<Traversal> traversals;
  double mean_travel_time_s = 0.0;
  std::optional<double> travel_time_delta_pct;
  std::uint64_t lane_changes_attempted = 0;
  std::uint64_t lane_changes_executed = 0;
  std::uint64_t lane_changes_aborted = 0;
  std::uint64_t odas_issued = 0;
  std::uint64_t odas_answered = 0;
  int max_odas_per_vehicle = 0;
  std::uint64_t beacons_sent = 0;
  std::uint64_t beacons_delivered = 0;
  double beacon_delivery_ratio = 0.0;
  std::uint64_t recycles = 0;
  SafetyAudit audit;
};

// Called after every tick with the in-corridor vehicles.
using TickObserver = std::function<void(double time_s, std::span<const VehicleState> world)>;

// Throws Error{kInvalidConfig} naming the violated field.
RunMetrics run_scenario(const ScenarioConfig& cfg, const TickObserver& observer = {});

// A vehicle standing on the road at time zero, for hand-built scenes.
struct PlacedVehicle {
  VehicleState state;
  // Scenery: never changes lane.
  bool hold_lane = false;
};

// Like run_scenario, but instead of spawning, exactly `vehicles` are on the
// road at t = 0 at their given positions and speeds. Everything else
// (channel, RSUs, decisions, recycling) follows cfg.
RunMetrics run_scene(const ScenarioConfig& cfg, std::span<const PlacedVehicle> vehicles,
                     const TickObserver& observer = {});

// (treatment - baseline) / baseline * 100, on mean travel time.
double travel_time_delta_pct(const RunMetrics& treatment, const RunMetrics& baseline);

// One row per traversal plus a trailing summary row, fixed column order:
//   record,elp,entry_lane,entry_time_s,exit_time_s,travel_time_s,
//   lane_changes,aborts,odas_issued,odas_answered,beacon_delivery_ratio
void write_run_csv(std::ostream& out, const RunMetrics& metrics);

}  // namespace lanesel
