#include "lanesel/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "lanesel/error.hpp"

namespace lanesel {

std::string_view to_string(DensityLevel d) {
  switch (d) {
    case DensityLevel::kLow: return "low";
    case DensityLevel::kMedium: return "medium";
    case DensityLevel::kHigh: return "high";
  }
  return "?";
}

std::string_view to_string(SystemMode m) {
  switch (m) {
    case SystemMode::kOff: return "off";
    case SystemMode::kProposed: return "proposed";
    case SystemMode::kStBaseline: return "st_baseline";
  }
  return "?";
}

std::optional<DensityLevel> parse_density(std::string_view s) {
  if (s == "low") return DensityLevel::kLow;
  if (s == "medium") return DensityLevel::kMedium;
  if (s == "high") return DensityLevel::kHigh;
  return std::nullopt;
}

std::optional<SystemMode> parse_mode(std::string_view s) {
  if (s == "off") return SystemMode::kOff;
  if (s == "proposed") return SystemMode::kProposed;
  if (s == "st_baseline") return SystemMode::kStBaseline;
  return std::nullopt;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

struct Field {
  std::string key;
  std::function<std::string(const ScenarioConfig&)> get;
  // Returns false on a malformed value.
  std::function<bool(ScenarioConfig&, std::string_view)> set;
};

Field real(std::string key, double ScenarioConfig::*member) {
  return {key, [member](const ScenarioConfig& c) { return format_double(c.*member); },
          [member](ScenarioConfig& c, std::string_view v) { return parse_number(v, c.*member); }};
}

template <typename Sub>
Field real(std::string key, Sub ScenarioConfig::*sub, double Sub::*member) {
  return {key, [sub, member](const ScenarioConfig& c) { return format_double(c.*sub.*member); },
          [sub, member](ScenarioConfig& c, std::string_view v) {
            return parse_number(v, c.*sub.*member);
          }};
}

template <typename T, typename Sub>
Field integer(std::string key, Sub ScenarioConfig::*sub, T Sub::*member) {
  return {key, [sub, member](const ScenarioConfig& c) { return std::to_string(c.*sub.*member); },
          [sub, member](ScenarioConfig& c, std::string_view v) {
            return parse_number(v, c.*sub.*member);
          }};
}

template <typename T>
Field integer(std::string key, T ScenarioConfig::*member) {
  return {key, [member](const ScenarioConfig& c) { return std::to_string(c.*member); },
          [member](ScenarioConfig& c, std::string_view v) { return parse_number(v, c.*member); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      real("duration_s", &ScenarioConfig::duration_s),
      integer("max_vehicles", &ScenarioConfig::max_vehicles),
      {"density", [](const ScenarioConfig& c) { return std::string(to_string(c.density)); },
       [](ScenarioConfig& c, std::string_view v) {
         auto d = parse_density(v);
         if (d) c.density = *d;
         return d.has_value();
       }},
      {"vehicle_count",
       [](const ScenarioConfig& c) { return c.vehicle_count ? std::to_string(*c.vehicle_count) : "auto"; },
       [](ScenarioConfig& c, std::string_view v) {
         if (v == "auto") {
           c.vehicle_count.reset();
           return true;
         }
         int n = 0;
         if (!parse_number(v, n)) return false;
         c.vehicle_count = n;
         return true;
       }},
      {"mode", [](const ScenarioConfig& c) { return std::string(to_string(c.mode)); },
       [](ScenarioConfig& c, std::string_view v) {
         auto m = parse_mode(v);
         if (m) c.mode = *m;
         return m.has_value();
       }},
      integer("oda_budget", &ScenarioConfig::oda_budget),
      integer("seed", &ScenarioConfig::seed),

      real("tx_range_m", &ScenarioConfig::channel, &ChannelConfig::tx_range_m),
      integer("slots_per_frame", &ScenarioConfig::channel, &ChannelConfig::slots_per_frame),
      real("slot_ms", &ScenarioConfig::channel, &ChannelConfig::slot_ms),
      real("nakagami_m", &ScenarioConfig::channel, &ChannelConfig::nakagami_m),
      real("path_loss_exponent", &ScenarioConfig::channel, &ChannelConfig::path_loss_exponent),
      real("data_rate_mbps", &ScenarioConfig::channel, &ChannelConfig::data_rate_mbps),
      real("tx_power_dbm", &ScenarioConfig::channel, &ChannelConfig::tx_power_dbm),

      real("corridor_length_m", &ScenarioConfig::corridor, &CorridorConfig::length_m),
      integer("lane_count", &ScenarioConfig::corridor, &CorridorConfig::lane_count),
      real("lane_width_m", &ScenarioConfig::corridor, &CorridorConfig::lane_width_m),
      real("visual_range_m", &ScenarioConfig::corridor, &CorridorConfig::visual_range_m),

      real("idm_max_accel_mps2", &ScenarioConfig::idm, &IdmParams::max_accel_mps2),
      real("idm_comfort_decel_mps2", &ScenarioConfig::idm, &IdmParams::comfort_decel_mps2),
      real("idm_time_headway_s", &ScenarioConfig::idm, &IdmParams::time_headway_s),
      real("idm_min_gap_m", &ScenarioConfig::idm, &IdmParams::min_gap_m),
      real("idm_accel_exponent", &ScenarioConfig::idm, &IdmParams::accel_exponent),
      real("idm_max_decel_mps2", &ScenarioConfig::idm, &IdmParams::max_decel_mps2),
      real("vehicle_length_m", &ScenarioConfig::idm, &IdmParams::vehicle_length_m),
      real("lane_change_safe_decel_mps2", &ScenarioConfig::idm, &IdmParams::safe_decel_mps2),

      real("high_speed_mps", &ScenarioConfig::events, &SuddenEventConfig::high_speed_mps),
      real("brake_decel_mps2", &ScenarioConfig::events, &SuddenEventConfig::brake_decel_mps2),
      real("avsud_threshold", &ScenarioConfig::avsud_threshold),
      real("neighborhood_radius_m", &ScenarioConfig::neighborhood_radius_m),
      integer("speed_window", &ScenarioConfig::speed_window),
      integer("rsu_expiry_ms", &ScenarioConfig::rsu_expiry_ms),

      real("decision_period_s", &ScenarioConfig::decision_period_s),
      real("hysteresis", &ScenarioConfig::hysteresis),
      real("min_desired_speed_mps", &ScenarioConfig::min_desired_speed_mps),
      real("max_desired_speed_mps", &ScenarioConfig::max_desired_speed_mps),
      real("entry_window_s", &ScenarioConfig::entry_window_s),

      real("erratic_fraction", &ScenarioConfig::erratic_fraction),
      real("erratic_brake_rate_hz", &ScenarioConfig::erratic_brake_rate_hz),
      real("erratic_brake_decel_mps2", &ScenarioConfig::erratic_brake_decel_mps2),
      real("erratic_brake_duration_s", &ScenarioConfig::erratic_brake_duration_s),

      real("st_cell_length_m", &ScenarioConfig::st_cell_length_m),
      real("st_lookahead_m", &ScenarioConfig::st_lookahead_m),

      {"free_flow", [](const ScenarioConfig& c) { return std::string(c.free_flow ? "true" : "false"); },
       [](ScenarioConfig& c, std::string_view v) {
         if (v != "true" && v != "false") return false;
         c.free_flow = v == "true";
         return true;
       }},
  };
  return table;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kInvalidConfig, what);
}

}  // namespace

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
  for (const auto& f : fields()) {
    if (f.get(a) != f.get(b)) return false;
  }
  return true;
}

int vehicle_count(const ScenarioConfig& cfg) {
  if (cfg.vehicle_count) return *cfg.vehicle_count;
  int percent = 50;
  switch (cfg.density) {
    case DensityLevel::kLow: percent = 25; break;
    case DensityLevel::kMedium: percent = 50; break;
    case DensityLevel::kHigh: percent = 75; break;
  }
  return cfg.max_vehicles * percent / 100;
}

void validate(const ScenarioConfig& cfg) {
  require(cfg.duration_s > 0.0, "duration_s must be > 0");
  require(cfg.max_vehicles >= 0, "max_vehicles must be >= 0");
  require(!cfg.vehicle_count || (*cfg.vehicle_count >= 0 && *cfg.vehicle_count <= cfg.max_vehicles),
          "vehicle_count must be in [0, max_vehicles]");
  require(cfg.oda_budget >= 0 && cfg.oda_budget <= kMaxOdaBudget, "oda_budget must be in [0, 50]");
  require(cfg.channel.tx_range_m == 300.0 || cfg.channel.tx_range_m == 500.0,
          "tx_range_m must be 300 or 500");
  const double rate = cfg.channel.data_rate_mbps;
  require(rate == 6.0 || rate == 12.0 || rate == 18.0 || rate == 27.0,
          "data_rate_mbps must be one of 6, 12, 18, 27");
  validate(cfg.channel);
  require(cfg.corridor.length_m > 0.0, "corridor_length_m must be > 0");
  require(cfg.corridor.lane_count >= 2 && cfg.corridor.lane_count % 2 == 0,
          "lane_count must be even and >= 2");
  require(cfg.corridor.lane_width_m > 0.0, "lane_width_m must be > 0");
  require(cfg.corridor.visual_range_m > 0.0, "visual_range_m must be > 0");
  require(cfg.idm.max_accel_mps2 > 0.0, "idm_max_accel_mps2 must be > 0");
  require(cfg.idm.comfort_decel_mps2 > 0.0, "idm_comfort_decel_mps2 must be > 0");
  require(cfg.idm.time_headway_s > 0.0, "idm_time_headway_s must be > 0");
  require(cfg.idm.min_gap_m > 0.0, "idm_min_gap_m must be > 0");
  require(cfg.idm.max_decel_mps2 >= cfg.idm.comfort_decel_mps2,
          "idm_max_decel_mps2 must be >= idm_comfort_decel_mps2");
  require(cfg.idm.vehicle_length_m > 0.0, "vehicle_length_m must be > 0");
  require(cfg.avsud_threshold >= 0.0, "avsud_threshold must be >= 0");
  require(cfg.neighborhood_radius_m > 0.0, "neighborhood_radius_m must be > 0");
  require(cfg.speed_window >= 1, "speed_window must be >= 1");
  require(cfg.decision_period_s >= 0.1, "decision_period_s must be >= 0.1");
  require(cfg.hysteresis >= 0.0 && cfg.hysteresis < 1.0, "hysteresis must be in [0, 1)");
  require(cfg.min_desired_speed_mps >= kMinDesiredSpeedMps &&
              cfg.max_desired_speed_mps <= kMaxDesiredSpeedMps &&
              cfg.min_desired_speed_mps <= cfg.max_desired_speed_mps,
          "desired speed range must lie within [15, 45] m/s");
  require(cfg.entry_window_s >= 0.0, "entry_window_s must be >= 0");
  require(cfg.erratic_fraction >= 0.0 && cfg.erratic_fraction <= 1.0,
          "erratic_fraction must be in [0, 1]");
  require(cfg.erratic_brake_rate_hz >= 0.0, "erratic_brake_rate_hz must be >= 0");
  require(cfg.st_cell_length_m > 0.0, "st_cell_length_m must be > 0");
  require(cfg.st_lookahead_m > 0.0, "st_lookahead_m must be > 0");
}

ScenarioConfig parse_config(std::string_view text) {
  ScenarioConfig cfg;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    require(eq != std::string_view::npos,
            "line " + std::to_string(line_no) + ": expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    bool known = false;
    for (const auto& f : fields()) {
      if (f.key != key) continue;
      known = true;
      require(f.set(cfg, value), "line " + std::to_string(line_no) + ": bad value for " +
                                     std::string(key) + ": '" + std::string(value) + "'");
    }
    require(known, "line " + std::to_string(line_no) + ": unknown key " + std::string(key));
  }
  return cfg;
}

ScenarioConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ScenarioConfig& cfg) {
  std::string out = "# lanesel scenario\n";
  for (const auto& f : fields()) out += f.key + " = " + f.get(cfg) + "\n";
  return out;
}

}  // namespace lanesel
