#include "lanesel/sim_engine.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <string>

#include "lanesel/error.hpp"
#include "lanesel/rsu_node.hpp"
#include "lanesel/st_baseline.hpp"

namespace lanesel {
namespace {

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2));
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t kSpawnStream = 1;
constexpr std::uint64_t kChannelStream = 2;
constexpr std::uint64_t kFirstElp = 1001;
constexpr int kFramesPerTick = 4;
constexpr std::uint64_t kFrameMs = 25;
// Decisions and ODA exchanges happen after the tick's last frame.
constexpr std::uint64_t kDecisionOffsetMs = 80;
constexpr double kMinEntrySpeedMps = 5.0;
constexpr double kImpededFraction = 0.9;
constexpr std::int16_t kNoSignalCdbm = -10000;

struct Agent {
  VehicleState state;
  bool active = false;
  double queued_since_s = 0.0;
  double entry_time_s = 0.0;
  int entry_lane = 0;
  std::uint32_t seq = 0;
  SpeedWindow own_window;
  Rng rng;
  int beacon_frame = 0;
  int decision_phase = 0;
  int odas_issued = 0;
  double brake_until_s = -1.0;
  bool hold_lane = false;
};

int random_lane_in_direction(Direction dir, const CorridorConfig& corridor, Rng& rng) {
  const int per_dir = corridor.lanes_per_direction();
  std::uniform_int_distribution<int> pick(0, per_dir - 1);
  const int offset = pick(rng);
  return dir == Direction::kEastbound ? offset : per_dir + offset;
}

class Simulation {
 public:
  Simulation(const ScenarioConfig& cfg, std::span<const PlacedVehicle> placed)
      : cfg_(cfg),
        sites_(place_rsus(cfg.corridor, cfg.channel)),
        channel_rng_(mix(cfg.seed, kChannelStream)),
        history_(make_cell_grid(cfg.corridor, cfg.st_cell_length_m)) {
    decision_ticks_ = std::max(1, static_cast<int>(std::lround(cfg.decision_period_s / kTickSeconds)));
    agents_.reserve(placed.size());
    for (const auto& p : placed) {
      Agent& a = add_agent(p.state, 0.0);
      a.active = true;
      a.entry_lane = p.state.lane_index;
      a.hold_lane = p.hold_lane;
    }
    init_rsus();
  }

  explicit Simulation(const ScenarioConfig& cfg)
      : cfg_(cfg),
        sites_(place_rsus(cfg.corridor, cfg.channel)),
        channel_rng_(mix(cfg.seed, kChannelStream)),
        history_(make_cell_grid(cfg.corridor, cfg.st_cell_length_m)) {
    Rng spawn_rng(mix(cfg.seed, kSpawnStream));
    const auto spawned = spawn_vehicles(cfg, spawn_rng);
    decision_ticks_ = std::max(1, static_cast<int>(std::lround(cfg.decision_period_s / kTickSeconds)));
    agents_.reserve(spawned.size());
    for (const auto& s : spawned) add_agent(s.state, s.entry_time_s);
    init_rsus();
  }

  RunMetrics run(const TickObserver& observer) {
    const auto ticks = static_cast<std::int64_t>(std::llround(cfg_.duration_s / kTickSeconds));
    for (std::int64_t k = 0; k < ticks; ++k) {
      tick(k);
      if (observer) observer(static_cast<double>(k + 1) * kTickSeconds, world_);
    }
    finish();
    return std::move(metrics_);
  }

 private:
  Agent& add_agent(const VehicleState& state, double entry_time_s) {
    Agent a;
    a.state = state;
    a.queued_since_s = entry_time_s;
    a.own_window = SpeedWindow(cfg_.speed_window);
    a.rng.seed(mix(cfg_.seed, state.elp));
    const std::uint64_t h = mix(state.elp, 0xC0FFEE);
    a.beacon_frame = static_cast<int>(h % kFramesPerTick);
    a.decision_phase = static_cast<int>((h >> 8) % static_cast<std::uint64_t>(decision_ticks_));
    agents_.push_back(std::move(a));
    return agents_.back();
  }

  void init_rsus() {
    RsuConfig rc;
    rc.coverage_radius_m = cfg_.channel.tx_range_m;
    rc.expiry_ms = cfg_.rsu_expiry_ms;
    rc.window_capacity = cfg_.speed_window;
    rc.events = cfg_.events;
    rc.avsud_threshold = cfg_.avsud_threshold;
    rc.neighborhood_radius_m = cfg_.neighborhood_radius_m;
    for (const auto& site : sites_) {
      rsus_.emplace_back(site.id, site.pos, rc, cfg_.corridor);
      receivers_.push_back({site.id, site.pos});
    }
  }

  void tick(std::int64_t k) {
    const double t = static_cast<double>(k) * kTickSeconds;
    const std::uint64_t now_ms = static_cast<std::uint64_t>(k) * kTickMs;

    admit_entries(t);
    for (auto& a : agents_) {
      if (a.active) a.own_window.push({now_ms, a.state.speed_mps});
    }
    refresh_world();

    exchange_beacons(k, now_ms);
    if (cfg_.mode == SystemMode::kStBaseline && k % decision_ticks_ == 0) record_cells();

    std::vector<std::pair<std::size_t, int>> lane_targets;
    if (!cfg_.free_flow) lane_targets = decide_lanes(k, now_ms + kDecisionOffsetMs);

    step_all(t);
    apply_lane_changes(lane_targets);
    retire_exits(t);

    refresh_world();
    metrics_.audit.check(world_, cfg_.idm);
  }

  void refresh_world() {
    world_.clear();
    world_agent_.clear();
    for (std::size_t i = 0; i < agents_.size(); ++i) {
      if (!agents_[i].active) continue;
      world_.push_back(agents_[i].state);
      world_agent_.push_back(i);
    }
  }

  void admit_entries(double t) {
    for (auto& a : agents_) {
      if (a.active || a.queued_since_s > t + 1e-9) continue;
      const int lane = a.state.lane_index;
      const Agent* last = nullptr;
      for (const auto& other : agents_) {
        if (!other.active || other.state.lane_index != lane) continue;
        if (!last || other.state.longitudinal_pos_m < last->state.longitudinal_pos_m) last = &other;
      }
      double speed = a.state.desired_speed_mps;
      if (last && !cfg_.free_flow) {
        const double gap = last->state.longitudinal_pos_m - cfg_.idm.vehicle_length_m;
        const double allowed = (gap - cfg_.idm.min_gap_m) / cfg_.idm.time_headway_s;
        if (allowed < kMinEntrySpeedMps) continue;
        speed = std::min(speed, allowed);
      }
      a.active = true;
      a.state.longitudinal_pos_m = 0.0;
      a.state.speed_mps = speed;
      a.entry_time_s = t;
      a.entry_lane = lane;
    }
  }

  Beacon make_beacon(Agent& a, std::uint64_t timestamp_ms) {
    const VehicleState& s = a.state;
    const Vec2 pos = cfg_.corridor.to_grid(s.lane_index, s.longitudinal_pos_m);
    const bool east = cfg_.corridor.direction_of(s.lane_index) == Direction::kEastbound;
    Beacon b;
    BeaconHeader& h = b.header;
    h.seq = ++a.seq;
    h.interval_ms = kMinBeaconIntervalMs;
    h.timestamp_ms = timestamp_ms;
    h.elp = s.elp;
    h.pos_x_cm = static_cast<std::int32_t>(std::lround(pos.x * 100.0));
    h.pos_y_cm = static_cast<std::int32_t>(std::lround(pos.y * 100.0));
    const auto speed_cms = static_cast<std::int16_t>(std::lround(s.speed_mps * 100.0));
    h.speed_cms = east ? speed_cms : static_cast<std::int16_t>(-speed_cms);
    h.dir_cdeg = east ? 0 : 18000;
    std::optional<double> best, worst;
    for (const auto& site : sites_) {
      const double d = distance(pos, site.pos);
      if (d > cfg_.channel.tx_range_m) continue;
      const double p = mean_rx_power_dbm(d, cfg_.channel);
      best = best ? std::max(*best, p) : p;
      worst = worst ? std::min(*worst, p) : p;
    }
    h.max_p_cdbm = best ? static_cast<std::int16_t>(std::lround(*best * 100.0)) : kNoSignalCdbm;
    h.min_p_cdbm = worst ? static_cast<std::int16_t>(std::lround(*worst * 100.0)) : kNoSignalCdbm;
    h.pow_u_cdbm = static_cast<std::int16_t>(std::lround(cfg_.channel.tx_power_dbm * 100.0));
    return b;
  }

  void exchange_beacons(std::int64_t k, std::uint64_t now_ms) {
    for (int f = 0; f < kFramesPerTick; ++f) {
      const std::uint64_t frame_index = static_cast<std::uint64_t>(k) * kFramesPerTick + f;
      const std::uint64_t ts = now_ms + static_cast<std::uint64_t>(f) * kFrameMs;
      std::vector<TxEvent> events;
      std::vector<Beacon> beacons;
      for (auto& a : agents_) {
        if (!a.active || a.beacon_frame != f) continue;
        beacons.push_back(make_beacon(a, ts));
        events.push_back({.sender_elp = a.state.elp,
                          .slot_index = assign_slot(a.state.elp, frame_index, cfg_.channel),
                          .frame_index = frame_index,
                          .payload_bytes = static_cast<std::uint32_t>(kSafetyMessageBytes),
                          .sender_pos = cfg_.corridor.to_grid(a.state.lane_index,
                                                              a.state.longitudinal_pos_m)});
      }
      metrics_.beacons_sent += events.size();
      const auto deliveries = resolve_frame(events, receivers_, cfg_.channel, channel_rng_);
      std::vector<bool> heard(events.size(), false);
      for (const auto& d : deliveries) {
        const auto idx = static_cast<std::size_t>(
            std::find(events.begin(), events.end(), d.event) - events.begin());
        heard[idx] = true;
        rsu_by_id(static_cast<std::uint32_t>(d.receiver_id)).ingest_beacon(beacons[idx], ts);
      }
      metrics_.beacons_delivered +=
          static_cast<std::uint64_t>(std::count(heard.begin(), heard.end(), true));
    }
    for (auto& rsu : rsus_) rsu.expire_stale(now_ms + (kFramesPerTick - 1) * kFrameMs);
  }

  RsuNode& rsu_by_id(std::uint32_t id) {
    for (auto& r : rsus_) {
      if (r.id() == id) return r;
    }
    throw Error(ErrorCode::kRunFailure, "unknown RSU " + std::to_string(id));
  }

  void record_cells() {
    const CellGrid& grid = history_.grid();
    std::vector<double> counts(grid.size(), 0.0);
    // A vehicle heard by several RSUs counts once, at its freshest report.
    std::map<std::uint64_t, const VehicleRecord*> freshest;
    for (const auto& rsu : rsus_) {
      for (const auto& [elp, rec] : rsu.registry()) {
        auto [it, inserted] = freshest.emplace(elp, &rec);
        if (!inserted && rec.last_timestamp_ms > it->second->last_timestamp_ms) it->second = &rec;
      }
    }
    for (const auto& [elp, rec] : freshest) {
      const Direction dir = cfg_.corridor.direction_of(rec->last_lane);
      const double s = cfg_.corridor.longitudinal_of(rec->last_pos, dir);
      counts[grid.index(rec->last_lane, grid.cell_of(s))] += 1.0;
    }
    for (auto& c : counts) c /= grid.cell_length_m;
    history_.record(std::move(counts));
  }

  std::vector<std::pair<std::size_t, int>> decide_lanes(std::int64_t k, std::uint64_t decision_ms) {
    std::vector<std::pair<std::size_t, int>> targets;
    for (std::size_t w = 0; w < world_.size(); ++w) {
      Agent& a = agents_[world_agent_[w]];
      if (a.hold_lane || (k + a.decision_phase) % decision_ticks_ != 0) continue;
      const VehicleState& v = world_[w];
      if (visible_downstream_density(v, v.lane_index, world_, cfg_.corridor) <= 0.0) continue;
      // A driver only contemplates a change when held below its desired speed.
      if (v.speed_mps >= kImpededFraction * v.desired_speed_mps) continue;
      auto choices = sense_choices(v, world_, cfg_.corridor, cfg_.idm);
      if (choices.empty()) continue;
      rank_by_sight(v, choices);

      std::optional<int> target;
      bool decided = false;
      if (cfg_.mode == SystemMode::kProposed) {
        decided = consult_rsu(a, v, choices, decision_ms, target);
      } else if (cfg_.mode == SystemMode::kStBaseline) {
        try {
          target = st_baseline_decision(
              v, history_, cfg_.corridor,
              {.lookahead_m = cfg_.st_lookahead_m, .hysteresis = cfg_.hysteresis});
          decided = true;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kInsufficientHistory) throw;
        }
      }
      if (!decided) target = baseline_lane_decision(v, choices, world_, cfg_.corridor, cfg_.hysteresis);
      if (target) targets.emplace_back(world_agent_[w], *target);
    }
    return targets;
  }

  // Returns false when no ODA could be issued and the driver falls back to
  // sight.
  bool consult_rsu(Agent& a, const VehicleState& v, const std::vector<GapDescriptor>& choices,
                   std::uint64_t decision_ms, std::optional<int>& target) {
    if (a.state.oda_budget_remaining <= 0) return false;
    const Vec2 pos = cfg_.corridor.to_grid(v.lane_index, v.longitudinal_pos_m);
    const auto rsu_id = nearest_rsu(pos, sites_, cfg_.channel);
    if (!rsu_id) return false;

    OdaRequest req;
    req.decider_elp = v.elp;
    req.decider_beacon = make_beacon(a, decision_ms);
    req.decider_acs_mps = compute_acs(a.own_window);
    const std::size_t n = std::min(choices.size(), kMaxOdaGaps);
    req.candidate_gaps.assign(choices.begin(), choices.begin() + static_cast<std::ptrdiff_t>(n));

    --a.state.oda_budget_remaining;
    ++a.odas_issued;
    ++metrics_.odas_issued;
    metrics_.max_odas_per_vehicle = std::max(metrics_.max_odas_per_vehicle, a.odas_issued);

    RsuNode& rsu = rsu_by_id(*rsu_id);
    // The request carries the decider's beacon, which registers it if needed.
    rsu.ingest_beacon(req.decider_beacon, decision_ms);
    const OdaResponse advice = rsu.handle_oda(req, decision_ms);
    ++metrics_.odas_answered;
    target = assisted_lane_decision(v, advice, decision_ms);
    return true;
  }

  // The driver numbers its candidates in its own order of preference: least
  // visibly crowded lane first, then lane index, then position.
  void rank_by_sight(const VehicleState& v, std::vector<GapDescriptor>& choices) const {
    std::vector<double> seen(static_cast<std::size_t>(cfg_.corridor.lane_count), 0.0);
    for (const auto& g : choices) {
      seen[static_cast<std::size_t>(g.lane_index)] =
          visible_downstream_density(v, g.lane_index, world_, cfg_.corridor);
    }
    std::stable_sort(choices.begin(), choices.end(), [&](const GapDescriptor& x, const GapDescriptor& y) {
      return seen[static_cast<std::size_t>(x.lane_index)] < seen[static_cast<std::size_t>(y.lane_index)];
    });
    for (std::size_t i = 0; i < choices.size(); ++i) choices[i].choice_id = static_cast<std::uint32_t>(i + 1);
  }

  void step_all(double t) {
    std::vector<std::vector<std::size_t>> lanes(static_cast<std::size_t>(cfg_.corridor.lane_count));
    for (std::size_t w = 0; w < world_.size(); ++w) {
      lanes[static_cast<std::size_t>(world_[w].lane_index)].push_back(w);
    }
    prev_pos_.assign(agents_.size(), 0.0);
    for (auto& members : lanes) {
      std::sort(members.begin(), members.end(), [&](std::size_t x, std::size_t y) {
        if (world_[x].longitudinal_pos_m != world_[y].longitudinal_pos_m) {
          return world_[x].longitudinal_pos_m < world_[y].longitudinal_pos_m;
        }
        return world_[x].elp < world_[y].elp;
      });
      for (std::size_t i = 0; i < members.size(); ++i) {
        const std::size_t w = members[i];
        const VehicleState* leader =
            (cfg_.free_flow || i + 1 == members.size()) ? nullptr : &world_[members[i + 1]];
        Agent& a = agents_[world_agent_[w]];
        prev_pos_[world_agent_[w]] = world_[w].longitudinal_pos_m;
        const VehicleState next =
            step_longitudinal(world_[w], leader, kTickSeconds, cfg_.idm, erratic_cap(a, t));
        a.state.longitudinal_pos_m = next.longitudinal_pos_m;
        a.state.speed_mps = next.speed_mps;
      }
    }
  }

  double erratic_cap(Agent& a, double t) {
    if (a.state.profile != DriverProfile::kErratic) return std::numeric_limits<double>::infinity();
    if (t >= a.brake_until_s && a.state.speed_mps > cfg_.events.high_speed_mps) {
      std::bernoulli_distribution start(std::min(1.0, cfg_.erratic_brake_rate_hz * kTickSeconds));
      if (start(a.rng)) a.brake_until_s = t + cfg_.erratic_brake_duration_s;
    }
    return t < a.brake_until_s ? -cfg_.erratic_brake_decel_mps2
                               : std::numeric_limits<double>::infinity();
  }

  void apply_lane_changes(const std::vector<std::pair<std::size_t, int>>& targets) {
    if (targets.empty()) return;
    refresh_world();
    for (const auto& [agent_idx, lane] : targets) {
      Agent& a = agents_[agent_idx];
      const auto w = static_cast<std::size_t>(
          std::find(world_agent_.begin(), world_agent_.end(), agent_idx) - world_agent_.begin());
      ++metrics_.lane_changes_attempted;
      const auto result = execute_lane_change(a.state, lane, world_, cfg_.corridor, cfg_.idm);
      if (result.status == LaneChangeStatus::kExecuted) {
        ++metrics_.lane_changes_executed;
        a.state.lane_index = result.state.lane_index;
        world_[w].lane_index = result.state.lane_index;
      } else {
        ++metrics_.lane_changes_aborted;
      }
    }
  }

  void retire_exits(double t) {
    const double length = cfg_.corridor.length_m;
    for (std::size_t i = 0; i < agents_.size(); ++i) {
      Agent& a = agents_[i];
      if (!a.active || a.state.longitudinal_pos_m < length) continue;
      const double travelled = a.state.longitudinal_pos_m - prev_pos_[i];
      const double fraction = travelled > 0.0 ? (length - prev_pos_[i]) / travelled : 1.0;
      const double exit_time = t + std::clamp(fraction, 0.0, 1.0) * kTickSeconds;
      metrics_.traversals.push_back({.elp = a.state.elp,
                                     .entry_lane = a.entry_lane,
                                     .entry_time_s = a.entry_time_s,
                                     .exit_time_s = exit_time});
      ++metrics_.recycles;
      const Direction dir = cfg_.corridor.direction_of(a.state.lane_index);
      a.active = false;
      a.queued_since_s = t + kTickSeconds;
      a.state.lane_index = random_lane_in_direction(dir, cfg_.corridor, a.rng);
      a.state.longitudinal_pos_m = 0.0;
      a.state.speed_mps = a.state.desired_speed_mps;
    }
  }

  void finish() {
    if (!metrics_.traversals.empty()) {
      double sum = 0.0;
      for (const auto& tr : metrics_.traversals) sum += tr.travel_time_s();
      metrics_.mean_travel_time_s = sum / static_cast<double>(metrics_.traversals.size());
    }
    metrics_.beacon_delivery_ratio =
        metrics_.beacons_sent ? static_cast<double>(metrics_.beacons_delivered) /
                                    static_cast<double>(metrics_.beacons_sent)
                              : 0.0;
  }

  const ScenarioConfig& cfg_;
  std::vector<RsuSite> sites_;
  std::vector<RsuNode> rsus_;
  std::vector<Receiver> receivers_;
  Rng channel_rng_;
  CellHistory history_;
  int decision_ticks_ = 20;
  std::vector<Agent> agents_;
  std::vector<VehicleState> world_;
  std::vector<std::size_t> world_agent_;
  std::vector<double> prev_pos_;
  RunMetrics metrics_;
};

void append_double(std::string& out, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

}  // namespace

std::vector<SpawnedVehicle> spawn_vehicles(const ScenarioConfig& cfg, Rng& rng) {
  const int count = vehicle_count(cfg);
  std::uniform_real_distribution<double> speed(cfg.min_desired_speed_mps, cfg.max_desired_speed_mps);
  std::uniform_real_distribution<double> entry(0.0, cfg.entry_window_s);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const DriveMode mode = cfg.mode == SystemMode::kProposed     ? DriveMode::kAssisted
                         : cfg.mode == SystemMode::kStBaseline ? DriveMode::kStBaseline
                                                               : DriveMode::kBaseline;
  std::vector<SpawnedVehicle> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    SpawnedVehicle s;
    const Direction dir = i % 2 == 0 ? Direction::kEastbound : Direction::kWestbound;
    s.state.elp = kFirstElp + static_cast<std::uint64_t>(i);
    // Every draw happens regardless of mode so spawn lists match across modes.
    s.state.lane_index = random_lane_in_direction(dir, cfg.corridor, rng);
    s.state.desired_speed_mps = speed(rng);
    s.entry_time_s = cfg.entry_window_s > 0.0 ? entry(rng) : 0.0;
    const bool erratic = unit(rng) < cfg.erratic_fraction;
    s.state.profile = erratic ? DriverProfile::kErratic : DriverProfile::kCalm;
    s.state.speed_mps = s.state.desired_speed_mps;
    s.state.mode = mode;
    s.state.oda_budget_remaining = cfg.mode == SystemMode::kProposed ? cfg.oda_budget : 0;
    out.push_back(s);
  }
  return out;
}

std::vector<RsuSite> place_rsus(const CorridorConfig& corridor, const ChannelConfig& channel) {
  constexpr double kGuardM = 50.0;
  const double range = channel.tx_range_m;
  // Longitudinal reach at the road edge farthest from the median.
  const double half_width = corridor.median_y();
  const double reach = std::sqrt(std::max(0.0, range * range - half_width * half_width));
  int count = std::max(1, static_cast<int>(std::ceil(corridor.length_m / (2.0 * reach))));
  if (count > 1 && corridor.length_m / count > 2.0 * (range - kGuardM)) {
    count = static_cast<int>(std::ceil(corridor.length_m / (2.0 * (range - kGuardM))));
  }
  std::vector<RsuSite> sites;
  const double spacing = corridor.length_m / count;
  for (int i = 0; i < count; ++i) {
    sites.push_back({static_cast<std::uint32_t>(i + 1), {(i + 0.5) * spacing, corridor.median_y()}});
  }
  return sites;
}

void SafetyAudit::check(std::span<const VehicleState> world, const IdmParams& idm) {
  ++ticks_checked;
  std::vector<const VehicleState*> sorted;
  sorted.reserve(world.size());
  for (const auto& v : world) {
    if (!(v.speed_mps >= 0.0 && v.speed_mps <= kMaxSpeedMps)) ++speed_violations;
    sorted.push_back(&v);
  }
  std::sort(sorted.begin(), sorted.end(), [](const VehicleState* a, const VehicleState* b) {
    if (a->lane_index != b->lane_index) return a->lane_index < b->lane_index;
    return a->longitudinal_pos_m < b->longitudinal_pos_m;
  });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i]->lane_index != sorted[i - 1]->lane_index) continue;
    if (bumper_gap(*sorted[i - 1], *sorted[i], idm) < idm.min_gap_m - 1e-9) ++overlap_events;
  }
}

RunMetrics run_scenario(const ScenarioConfig& cfg, const TickObserver& observer) {
  validate(cfg);
  Simulation sim(cfg);
  return sim.run(observer);
}

RunMetrics run_scene(const ScenarioConfig& cfg, std::span<const PlacedVehicle> vehicles,
                     const TickObserver& observer) {
  validate(cfg);
  for (const auto& p : vehicles) {
    if (!cfg.corridor.valid_lane(p.state.lane_index) || p.state.longitudinal_pos_m < 0.0 ||
        p.state.longitudinal_pos_m > cfg.corridor.length_m) {
      throw Error(ErrorCode::kInvalidConfig, "placed vehicle " + std::to_string(p.state.elp) +
                                                 " is off the corridor");
    }
  }
  Simulation sim(cfg, vehicles);
  return sim.run(observer);
}

double travel_time_delta_pct(const RunMetrics& treatment, const RunMetrics& baseline) {
  if (!(baseline.mean_travel_time_s > 0.0)) {
    throw Error(ErrorCode::kRunFailure, "baseline run has no traversals");
  }
  return (treatment.mean_travel_time_s - baseline.mean_travel_time_s) / baseline.mean_travel_time_s *
         100.0;
}

void write_run_csv(std::ostream& out, const RunMetrics& m) {
  std::string buf =
      "record,elp,entry_lane,entry_time_s,exit_time_s,travel_time_s,lane_changes,aborts,"
      "odas_issued,odas_answered,beacon_delivery_ratio\n";
  for (const auto& tr : m.traversals) {
    buf += "traversal," + std::to_string(tr.elp) + "," + std::to_string(tr.entry_lane) + ",";
    append_double(buf, tr.entry_time_s);
    buf += ",";
    append_double(buf, tr.exit_time_s);
    buf += ",";
    append_double(buf, tr.travel_time_s());
    buf += ",,,,,\n";
  }
  buf += "summary,,,,,";
  append_double(buf, m.mean_travel_time_s);
  buf += "," + std::to_string(m.lane_changes_executed) + "," + std::to_string(m.lane_changes_aborted) +
         "," + std::to_string(m.odas_issued) + "," + std::to_string(m.odas_answered) + ",";
  append_double(buf, m.beacon_delivery_ratio);
  buf += "\n";
  out << buf;
}

}  // namespace lanesel
