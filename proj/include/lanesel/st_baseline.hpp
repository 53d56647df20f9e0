#pragma once

// Simplified spatiotemporal baseline: lanes are cut into fixed cells, each
// cell's density is extrapolated one epoch ahead from its last two
// observations, and the driver heads for the adjacent lane with the lowest
// predicted density downstream. A stand-in for a full spatiotemporal
// lane-level predictor, not a reimplementation of one.

#include <cstddef>
#include <deque>
#include <optional>
#include <vector>

#include "lanesel/corridor.hpp"
#include "lanesel/mobility.hpp"

namespace lanesel {

struct CellGrid {
  double cell_length_m = 100.0;
  int cells_per_lane = 10;
  int lane_count = 6;

  std::size_t index(int lane, int cell) const {
    return static_cast<std::size_t>(lane) * static_cast<std::size_t>(cells_per_lane) +
           static_cast<std::size_t>(cell);
  }
  std::size_t size() const {
    return static_cast<std::size_t>(lane_count) * static_cast<std::size_t>(cells_per_lane);
  }
  // Cell index along the lane's direction of travel, clamped to the grid.
  int cell_of(double longitudinal_m) const;
};

CellGrid make_cell_grid(const CorridorConfig& corridor, double cell_length_m);

// Per-epoch densities (vehicles per metre) for every (lane, cell), oldest
// first. Keeps at most max_epochs.
class CellHistory {
 public:
  explicit CellHistory(CellGrid grid, std::size_t max_epochs = 4);

  void record(std::vector<double> densities);
  std::size_t epochs() const { return epochs_.size(); }
  const CellGrid& grid() const { return grid_; }
  double observed(std::size_t epochs_ago, int lane, int cell) const;

  // max(0, 2 d[t] - d[t-1]). Requires two epochs.
  double predicted(int lane, int cell) const;

 private:
  CellGrid grid_;
  std::size_t max_epochs_;
  std::deque<std::vector<double>> epochs_;
};

struct StBaselineParams {
  double lookahead_m = 300.0;
  double hysteresis = kDefaultHysteresis;
};

// Mean predicted density over the cells in (pos, pos + lookahead] of a lane.
double predicted_downstream_density(const VehicleState& v, int lane, const CellHistory& history,
                                    const CorridorConfig& corridor, const StBaselineParams& params);

// Adjacent same-direction lane with the lowest predicted downstream density
// (ties to the lower lane index), taken only if it undercuts the current
// lane by the hysteresis margin. Never leaves the direction of travel.
// Throws Error{kInsufficientHistory} with fewer than two epochs.
std::optional<int> st_baseline_decision(const VehicleState& v, const CellHistory& history,
                                        const CorridorConfig& corridor,
                                        const StBaselineParams& params = {});

}  // namespace lanesel
