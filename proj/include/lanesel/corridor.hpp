#pragma once

// Geometry of the two-way highway corridor. The corridor runs along the
// grid's x axis starting at the southwest corner; lane i's centreline sits at
// y = (i + 0.5) * lane_width. The first half of the lanes carry eastbound
// traffic (+x), the second half westbound (-x).

#include <cmath>
#include <cstdint>

namespace lanesel {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

enum class Direction { kEastbound, kWestbound };

struct CorridorConfig {
  double length_m = 1000.0;
  int lane_count = 6;
  double lane_width_m = 3.5;
  double visual_range_m = 60.0;

  int lanes_per_direction() const { return lane_count / 2; }

  bool valid_lane(int lane) const { return lane >= 0 && lane < lane_count; }

  Direction direction_of(int lane) const {
    return lane < lanes_per_direction() ? Direction::kEastbound : Direction::kWestbound;
  }

  bool same_direction(int a, int b) const { return direction_of(a) == direction_of(b); }

  // Longitudinal position is measured along the direction of travel, 0 at
  // the entrance.
  Vec2 to_grid(int lane, double longitudinal_m) const {
    const double y = (lane + 0.5) * lane_width_m;
    const double x = direction_of(lane) == Direction::kEastbound ? longitudinal_m
                                                                 : length_m - longitudinal_m;
    return {x, y};
  }

  double longitudinal_of(Vec2 grid, Direction dir) const {
    return dir == Direction::kEastbound ? grid.x : length_m - grid.x;
  }

  int lane_from_y(double y_m) const {
    const int lane = static_cast<int>(std::floor(y_m / lane_width_m));
    return lane < 0 ? 0 : (lane >= lane_count ? lane_count - 1 : lane);
  }

  double median_y() const { return lanes_per_direction() * lane_width_m; }
};

}  // namespace lanesel
