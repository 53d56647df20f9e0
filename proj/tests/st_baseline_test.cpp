#include "lanesel/st_baseline.hpp"

#include <vector>

#include <gtest/gtest.h>

#include "support/expect_error.hpp"

namespace lanesel {
namespace {

const CorridorConfig kCorridor{};

std::vector<double> uniform(const CellGrid& g, double d) { return std::vector<double>(g.size(), d); }

TEST(CellGrid, CoversCorridor) {
  const CellGrid g = make_cell_grid(kCorridor, 100.0);
  EXPECT_EQ(g.cells_per_lane, 10);
  EXPECT_EQ(g.size(), 60u);
  EXPECT_EQ(g.cell_of(0.0), 0);
  EXPECT_EQ(g.cell_of(99.99), 0);
  EXPECT_EQ(g.cell_of(100.0), 1);
  EXPECT_EQ(g.cell_of(1000.0), 9);
  EXPECT_EQ(g.cell_of(-3.0), 0);
  EXPECT_EQ(make_cell_grid(kCorridor, 300.0).cells_per_lane, 4);
}

TEST(CellHistory, LinearExtrapolationClampedAtZero) {
  const CellGrid g = make_cell_grid(kCorridor, 100.0);
  CellHistory h(g, 3);
  h.record(uniform(g, 0.02));
  EXPECT_LANESEL_ERROR(h.predicted(0, 0), ErrorCode::kInsufficientHistory);
  auto next = uniform(g, 0.03);
  next[g.index(1, 4)] = 0.005;
  h.record(next);
  EXPECT_DOUBLE_EQ(h.predicted(0, 0), 0.04);
  EXPECT_DOUBLE_EQ(h.predicted(1, 4), 0.0);
  h.record(uniform(g, 0.03));
  h.record(uniform(g, 0.03));
  EXPECT_EQ(h.epochs(), 3u);
  EXPECT_LANESEL_ERROR(h.record(std::vector<double>(5)), ErrorCode::kInvalidField);
}

VehicleState at(int lane, double pos) {
  VehicleState v;
  v.elp = 1;
  v.lane_index = lane;
  v.longitudinal_pos_m = pos;
  return v;
}

TEST(StBaseline, AveragesCellsInLookahead) {
  const CellGrid g = make_cell_grid(kCorridor, 100.0);
  CellHistory h(g);
  auto d = uniform(g, 0.0);
  for (int c = 0; c < 10; ++c) d[g.index(0, c)] = 0.01 * c;
  h.record(d);
  h.record(d);
  // (150, 450] touches cells 1..4.
  EXPECT_DOUBLE_EQ(predicted_downstream_density(at(0, 150.0), 0, h, kCorridor, {}), 0.025);
  // (100, 400] touches cells 1..3 exactly.
  EXPECT_DOUBLE_EQ(predicted_downstream_density(at(0, 100.0), 0, h, kCorridor, {}), 0.02);
  // Clipped at the exit.
  EXPECT_DOUBLE_EQ(predicted_downstream_density(at(0, 850.0), 0, h, kCorridor, {}), 0.085);
}

TEST(StBaseline, DecisionPicksLowestPredictedAdjacentLane) {
  const CellGrid g = make_cell_grid(kCorridor, 100.0);
  CellHistory h(g);
  EXPECT_LANESEL_ERROR(st_baseline_decision(at(1, 100.0), h, kCorridor), ErrorCode::kInsufficientHistory);

  auto before = uniform(g, 0.02);
  auto now = uniform(g, 0.02);
  // Lane 2 is emptying out; lane 0 is filling up.
  for (int c = 0; c < 10; ++c) {
    before[g.index(2, c)] = 0.03;
    now[g.index(2, c)] = 0.015;
    now[g.index(0, c)] = 0.03;
  }
  h.record(before);
  h.record(now);
  EXPECT_EQ(st_baseline_decision(at(1, 100.0), h, kCorridor), 2);
  // Lane 2 is the edge of the eastbound side: only lane 1 is adjacent.
  EXPECT_EQ(st_baseline_decision(at(2, 100.0), h, kCorridor), std::nullopt);
  EXPECT_EQ(st_baseline_decision(at(0, 100.0), h, kCorridor), 1);

  h.record(uniform(g, 0.02));
  h.record(uniform(g, 0.02));
  EXPECT_EQ(st_baseline_decision(at(1, 100.0), h, kCorridor), std::nullopt);
}

}  // namespace
}  // namespace lanesel
