#include "lanesel/st_baseline.hpp"

#include <algorithm>
#include <cmath>

#include "lanesel/error.hpp"

namespace lanesel {

int CellGrid::cell_of(double longitudinal_m) const {
  const int c = static_cast<int>(std::floor(longitudinal_m / cell_length_m));
  return std::clamp(c, 0, cells_per_lane - 1);
}

CellGrid make_cell_grid(const CorridorConfig& corridor, double cell_length_m) {
  CellGrid g;
  g.cell_length_m = cell_length_m;
  g.cells_per_lane = std::max(1, static_cast<int>(std::ceil(corridor.length_m / cell_length_m)));
  g.lane_count = corridor.lane_count;
  return g;
}

CellHistory::CellHistory(CellGrid grid, std::size_t max_epochs)
    : grid_(grid), max_epochs_(std::max<std::size_t>(max_epochs, 2)) {}

void CellHistory::record(std::vector<double> densities) {
  if (densities.size() != grid_.size()) {
    throw Error(ErrorCode::kInvalidField, "cell density vector does not match the grid");
  }
  epochs_.push_back(std::move(densities));
  while (epochs_.size() > max_epochs_) epochs_.pop_front();
}

double CellHistory::observed(std::size_t epochs_ago, int lane, int cell) const {
  return epochs_[epochs_.size() - 1 - epochs_ago][grid_.index(lane, cell)];
}

double CellHistory::predicted(int lane, int cell) const {
  if (epochs_.size() < 2) throw Error(ErrorCode::kInsufficientHistory, "need two epochs");
  const double now = observed(0, lane, cell);
  const double before = observed(1, lane, cell);
  return std::max(0.0, now + (now - before));
}

double predicted_downstream_density(const VehicleState& v, int lane, const CellHistory& history,
                                    const CorridorConfig& corridor, const StBaselineParams& params) {
  const CellGrid& grid = history.grid();
  const double start = v.longitudinal_pos_m;
  const double end = std::min(corridor.length_m, start + params.lookahead_m);
  if (end <= start) return history.predicted(lane, grid.cell_of(start));
  const int first = grid.cell_of(start);
  const int last = grid.cell_of(std::nextafter(end, start));
  double sum = 0.0;
  for (int c = first; c <= last; ++c) sum += history.predicted(lane, c);
  return sum / static_cast<double>(last - first + 1);
}

std::optional<int> st_baseline_decision(const VehicleState& v, const CellHistory& history,
                                        const CorridorConfig& corridor,
                                        const StBaselineParams& params) {
  if (history.epochs() < 2) {
    throw Error(ErrorCode::kInsufficientHistory, "spatiotemporal baseline needs two epochs");
  }
  const double current = predicted_downstream_density(v, v.lane_index, history, corridor, params);
  std::optional<int> best;
  double best_density = 0.0;
  for (int lane : {v.lane_index - 1, v.lane_index + 1}) {
    if (!corridor.valid_lane(lane) || !corridor.same_direction(lane, v.lane_index)) continue;
    const double d = predicted_downstream_density(v, lane, history, corridor, params);
    if (!best || d < best_density) {
      best = lane;
      best_density = d;
    }
  }
  if (!best) return std::nullopt;
  if (best_density < current && best_density <= current * (1.0 - params.hysteresis)) return best;
  return std::nullopt;
}

}  // namespace lanesel
