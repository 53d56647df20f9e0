#include "lanesel/sim_engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "support/expect_error.hpp"
#include "support/fixtures.hpp"
#include "support/hidden_congestion_scene.hpp"

namespace lanesel {
namespace {

ScenarioConfig short_config(SystemMode mode, std::uint64_t seed = 3) {
  ScenarioConfig cfg;
  cfg.mode = mode;
  cfg.seed = seed;
  cfg.duration_s = 90.0;
  cfg.density = DensityLevel::kLow;
  return cfg;
}

TEST(SpawnVehicles, CountsDirectionsAndRanges) {
  for (auto [density, n] : {std::pair{DensityLevel::kLow, 50}, {DensityLevel::kMedium, 100},
                            {DensityLevel::kHigh, 150}}) {
    ScenarioConfig cfg;
    cfg.density = density;
    Rng rng(1);
    const auto spawned = spawn_vehicles(cfg, rng);
    ASSERT_EQ(spawned.size(), static_cast<std::size_t>(n));
    int east = 0;
    for (const auto& s : spawned) {
      east += s.state.lane_index < 3;
      EXPECT_GE(s.state.desired_speed_mps, 15.0);
      EXPECT_LE(s.state.desired_speed_mps, 45.0);
      EXPECT_GE(s.entry_time_s, 0.0);
      EXPECT_LE(s.entry_time_s, cfg.entry_window_s);
    }
    EXPECT_EQ(east, n / 2);
  }
}

TEST(SpawnVehicles, SameDrawsInEveryMode) {
  ScenarioConfig off = short_config(SystemMode::kOff);
  ScenarioConfig on = short_config(SystemMode::kProposed);
  Rng a(9), b(9);
  const auto x = spawn_vehicles(off, a);
  const auto y = spawn_vehicles(on, b);
  ASSERT_EQ(x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_EQ(x[i].entry_time_s, y[i].entry_time_s);
    EXPECT_EQ(x[i].state.lane_index, y[i].state.lane_index);
    EXPECT_EQ(x[i].state.desired_speed_mps, y[i].state.desired_speed_mps);
    EXPECT_EQ(x[i].state.oda_budget_remaining, 0);
    EXPECT_EQ(y[i].state.oda_budget_remaining, kMaxOdaBudget);
  }
}

TEST(PlaceRsus, EveryPointWithinRange) {
  for (double range : {300.0, 500.0}) {
    CorridorConfig corridor;
    ChannelConfig channel;
    channel.tx_range_m = range;
    const auto sites = place_rsus(corridor, channel);
    ASSERT_FALSE(sites.empty());
    for (std::size_t i = 1; i < sites.size(); ++i) {
      EXPECT_LE(sites[i].pos.x - sites[i - 1].pos.x, 2.0 * (range - 50.0));
    }
    // Sweep the road surface, edges included, at 1 m resolution.
    for (double y = 0.0; y <= 2.0 * corridor.median_y(); y += corridor.lane_width_m / 2.0) {
      for (double x = 0.0; x <= corridor.length_m; x += 1.0) {
        const Vec2 p{x, y};
        double best = 1e9;
        for (const auto& s : sites) best = std::min(best, distance(p, s.pos));
        ASSERT_LE(best, range) << "range " << range << " y " << y << " x " << x;
      }
    }
  }
  ChannelConfig near;
  const auto two = place_rsus(CorridorConfig{}, near);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0].pos, (Vec2{250.0, 10.5}));
  EXPECT_EQ(two[1].pos, (Vec2{750.0, 10.5}));
  near.tx_range_m = 500.0;
  // One RSU at 500 m would leave the outer-lane corners 8 cm out of reach.
  EXPECT_EQ(place_rsus(CorridorConfig{}, near).size(), 2u);
}

TEST(RunScenario, FreeFlowTravelTimeMatchesKinematics) {
  ScenarioConfig cfg = short_config(SystemMode::kOff);
  cfg.free_flow = true;
  cfg.duration_s = 200.0;
  std::map<std::uint64_t, double> desired;
  const RunMetrics m = run_scenario(cfg, [&](double, std::span<const VehicleState> world) {
    for (const auto& v : world) desired[v.elp] = v.desired_speed_mps;
  });
  ASSERT_GT(m.traversals.size(), 50u);
  double sum = 0.0;
  for (const auto& t : m.traversals) sum += cfg.corridor.length_m / desired.at(t.elp);
  const double oracle = sum / static_cast<double>(m.traversals.size());
  EXPECT_NEAR(m.mean_travel_time_s, oracle, 0.05 * oracle);
}

TEST(RunScenario, ZeroVehiclesFinishesCleanly) {
  ScenarioConfig cfg = short_config(SystemMode::kProposed);
  cfg.vehicle_count = 0;
  const RunMetrics m = run_scenario(cfg);
  EXPECT_TRUE(m.traversals.empty());
  EXPECT_EQ(m.odas_issued, 0u);
  EXPECT_EQ(m.mean_travel_time_s, 0.0);
  EXPECT_LANESEL_ERROR(travel_time_delta_pct(m, m), ErrorCode::kRunFailure);
}

TEST(RunScenario, OffModeIssuesNoOdas) {
  const RunMetrics m = run_scenario(short_config(SystemMode::kOff));
  EXPECT_EQ(m.odas_issued, 0u);
  EXPECT_GT(m.beacons_sent, 0u);
  EXPECT_GT(m.beacon_delivery_ratio, 0.0);
  EXPECT_LE(m.beacon_delivery_ratio, 1.0);
}

TEST(RunScenario, BudgetCapsOdasPerVehicle) {
  for (int budget : {0, 3, 50}) {
    ScenarioConfig cfg = short_config(SystemMode::kProposed);
    cfg.density = DensityLevel::kHigh;
    cfg.oda_budget = budget;
    const RunMetrics m = run_scenario(cfg);
    EXPECT_LE(m.max_odas_per_vehicle, budget);
    EXPECT_LE(m.odas_answered, m.odas_issued);
    if (budget == 0) {
      EXPECT_EQ(m.odas_issued, 0u);
    }
  }
}

TEST(RunScenario, DeterministicForSeed) {
  for (auto mode : {SystemMode::kOff, SystemMode::kProposed, SystemMode::kStBaseline}) {
    std::ostringstream a, b;
    write_run_csv(a, run_scenario(short_config(mode, 11)));
    write_run_csv(b, run_scenario(short_config(mode, 11)));
    EXPECT_EQ(a.str(), b.str()) << to_string(mode);
  }
  std::ostringstream c, d;
  write_run_csv(c, run_scenario(short_config(SystemMode::kOff, 11)));
  write_run_csv(d, run_scenario(short_config(SystemMode::kOff, 12)));
  EXPECT_NE(c.str(), d.str());
}

TEST(RunScenario, ConservesVehiclesAndStaysSafe) {
  ScenarioConfig cfg = short_config(SystemMode::kProposed);
  cfg.density = DensityLevel::kHigh;
  std::size_t max_on_road = 0;
  const RunMetrics m = run_scenario(cfg, [&](double, std::span<const VehicleState> world) {
    max_on_road = std::max(max_on_road, world.size());
    for (const auto& v : world) {
      ASSERT_GE(v.lane_index, 0);
      ASSERT_LT(v.lane_index, 6);
      ASSERT_GE(v.longitudinal_pos_m, 0.0);
      ASSERT_LE(v.longitudinal_pos_m, cfg.corridor.length_m);
    }
  });
  EXPECT_LE(max_on_road, 150u);
  EXPECT_EQ(m.audit.overlap_events, 0u);
  EXPECT_EQ(m.audit.speed_violations, 0u);
  EXPECT_EQ(m.audit.ticks_checked, 900u);
  for (const auto& t : m.traversals) {
    EXPECT_GT(t.travel_time_s(), 0.0);
    EXPECT_LE(t.exit_time_s, cfg.duration_s);
  }
}

TEST(RunScenario, InvalidConfigIsRejected) {
  ScenarioConfig cfg = short_config(SystemMode::kOff);
  cfg.channel.tx_range_m = 250.0;
  EXPECT_LANESEL_ERROR(run_scenario(cfg), ErrorCode::kInvalidConfig);
  std::vector<PlacedVehicle> off_road = {testing::scene_vehicle(1, 9, 10.0, 20.0, 20.0, false)};
  EXPECT_LANESEL_ERROR(run_scene(short_config(SystemMode::kOff), off_road), ErrorCode::kInvalidConfig);
}

TEST(SafetyAudit, CountsOverlapsAndBadSpeeds) {
  IdmParams idm;
  VehicleState a, b, c;
  a.lane_index = b.lane_index = 0;
  a.longitudinal_pos_m = 100.0;
  b.longitudinal_pos_m = 106.0;  // 1 m bumper gap
  c.lane_index = 1;
  c.longitudinal_pos_m = 101.0;
  c.speed_mps = 46.0;
  SafetyAudit audit;
  audit.check(std::vector<VehicleState>{a, b, c}, idm);
  EXPECT_EQ(audit.overlap_events, 1u);
  EXPECT_EQ(audit.speed_violations, 1u);
  EXPECT_EQ(audit.ticks_checked, 1u);
}

TEST(WriteRunCsv, HeaderMatchesFixtureAndSummaryIsLast) {
  const RunMetrics m = run_scenario(short_config(SystemMode::kOff));
  std::ostringstream out;
  write_run_csv(out, m);
  const std::string csv = out.str();
  const std::string header = testing::read_fixture("run_csv_header.txt");
  ASSERT_EQ(csv.substr(0, header.size()), header);
  std::istringstream lines(csv);
  std::string line, last;
  std::size_t traversals = 0;
  std::getline(lines, line);
  while (std::getline(lines, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 10) << line;
    traversals += line.rfind("traversal,", 0) == 0;
    last = line;
  }
  EXPECT_EQ(traversals, m.traversals.size());
  EXPECT_EQ(last.rfind("summary,", 0), 0u);
}

TEST(HiddenCongestion, AdviceAvoidsTheHiddenCluster) {
  const auto off = testing::run_hidden_congestion(SystemMode::kOff);
  const auto on = testing::run_hidden_congestion(SystemMode::kProposed);
  EXPECT_EQ(off.first_lane, testing::kSceneVisualLane);
  EXPECT_EQ(on.first_lane, testing::kSceneAdvisedLane);
  ASSERT_GT(off.traversal_time_s, 0.0);
  ASSERT_GT(on.traversal_time_s, 0.0);
  EXPECT_LT(on.traversal_time_s, off.traversal_time_s);
}

}  // namespace
}  // namespace lanesel
