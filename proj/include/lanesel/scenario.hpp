#pragma once

// Scenario configuration and its plain-text file format.
//
// One `key = value` per line; `#` starts a comment; blank lines are
// ignored; unknown keys are rejected. serialize_config() writes every key in
// a fixed order, so parse(serialize(c)) == c.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "lanesel/corridor.hpp"
#include "lanesel/mobility.hpp"
#include "lanesel/radio_channel.hpp"
#include "lanesel/traffic_analytics.hpp"

namespace lanesel {

enum class DensityLevel { kLow, kMedium, kHigh };
enum class SystemMode { kOff, kProposed, kStBaseline };

std::string_view to_string(DensityLevel d);
std::string_view to_string(SystemMode m);
std::optional<DensityLevel> parse_density(std::string_view s);
std::optional<SystemMode> parse_mode(std::string_view s);

struct ScenarioConfig {
  double duration_s = 300.0;
  int max_vehicles = 200;
  DensityLevel density = DensityLevel::kMedium;
  // Overrides the density mapping when set.
  std::optional<int> vehicle_count;
  SystemMode mode = SystemMode::kOff;
  int oda_budget = kMaxOdaBudget;
  std::uint64_t seed = 1;

  ChannelConfig channel;
  CorridorConfig corridor;
  IdmParams idm;

  SuddenEventConfig events;
  double avsud_threshold = kDefaultAvSudThreshold;
  double neighborhood_radius_m = 100.0;
  std::size_t speed_window = 20;
  std::uint64_t rsu_expiry_ms = 1000;

  double decision_period_s = 2.0;
  double hysteresis = kDefaultHysteresis;
  double min_desired_speed_mps = kMinDesiredSpeedMps;
  double max_desired_speed_mps = kMaxDesiredSpeedMps;
  double entry_window_s = 30.0;

  double erratic_fraction = 0.0;
  double erratic_brake_rate_hz = 0.1;
  double erratic_brake_decel_mps2 = 6.0;
  double erratic_brake_duration_s = 1.0;

  double st_cell_length_m = 100.0;
  double st_lookahead_m = 300.0;

  // Disables car following and lane changes; vehicles pass through each other.
  bool free_flow = false;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&);
};

// Number of vehicles for the scenario: the override if set, else 25/50/75%
// of max_vehicles for Low/Medium/High.
int vehicle_count(const ScenarioConfig& cfg);

// Throws Error{kInvalidConfig} naming the first violated field.
void validate(const ScenarioConfig& cfg);

// Throws Error{kInvalidConfig} on syntax errors, unknown keys or bad values
// (the message names the line and key). Does not call validate().
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config_file(const std::string& path);
std::string serialize_config(const ScenarioConfig& cfg);

}  // namespace lanesel
