#pragma once

// Speed and driver-behaviour analytics used by the roadside unit to judge
// candidate lane gaps.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

namespace lanesel {

inline constexpr double kMaxSpeedMps = 45.0;

struct SpeedSample {
  std::uint64_t timestamp_ms = 0;
  double speed_mps = 0.0;

  friend bool operator==(const SpeedSample&, const SpeedSample&) = default;
};

// Bounded window of recent speed samples for one vehicle. Samples are kept
// in strictly increasing timestamp order; anything older than max_age_ms
// relative to the newest sample is evicted, as is the oldest sample once the
// window is full.
class SpeedWindow {
 public:
  static constexpr std::size_t kDefaultCapacity = 20;
  static constexpr std::uint64_t kDefaultMaxAgeMs = 5000;

  explicit SpeedWindow(std::size_t capacity = kDefaultCapacity,
                       std::uint64_t max_age_ms = kDefaultMaxAgeMs);

  // Throws Error{kInvalidField} on a non-increasing timestamp or a speed
  // magnitude outside [0, 45] m/s.
  void push(SpeedSample sample);

  // Drops samples older than now_ms - max_age_ms.
  void evict_older_than(std::uint64_t now_ms);

  bool empty() const { return samples_.empty(); }
  std::size_t size() const { return samples_.size(); }
  std::size_t capacity() const { return capacity_; }
  const std::deque<SpeedSample>& samples() const { return samples_; }

 private:
  std::size_t capacity_;
  std::uint64_t max_age_ms_;
  std::deque<SpeedSample> samples_;
};

// Average current speed: arithmetic mean of the window's sample speeds.
// Throws Error{kEmptyWindow}.
double compute_acs(const SpeedWindow& window);

struct FleetEntry {
  std::uint64_t elp = 0;
  double acs_mps = 0.0;
  // Absent while the RSU has no observation interval for this vehicle yet.
  std::optional<double> avsud;
};

struct FleetSnapshot {
  std::vector<FleetEntry> vehicles;

  std::size_t size() const { return vehicles.size(); }
  bool empty() const { return vehicles.empty(); }
};

// Average of all vehicles' speed: mean of the per-vehicle ACS values.
// Throws Error{kEmptyFleet}.
double compute_aavs(const FleetSnapshot& fleet);

// True iff acs is strictly greater than aavs.
bool analyse_speed(double acs_mps, double aavs_mps);

struct TrajectoryPoint {
  std::uint64_t timestamp_ms = 0;
  double speed_mps = 0.0;
  int lane_index = 0;
};

struct SuddenEventConfig {
  double high_speed_mps = 25.0;
  double brake_decel_mps2 = 4.0;
};

struct SuddenEventCounts {
  std::uint64_t sud_brk = 0;
  std::uint64_t chg_loc = 0;
  std::uint64_t n = 0;

  // Classifies the interval prev -> next and adds it to the tallies. Both
  // event kinds are gated on the speed at the start of the interval.
  void accumulate(const TrajectoryPoint& prev, const TrajectoryPoint& next,
                  const SuddenEventConfig& cfg);

  friend bool operator==(const SuddenEventCounts&, const SuddenEventCounts&) = default;
};

// Batch tally over a whole trajectory. Throws Error{kTooShort} for fewer
// than two points and Error{kInvalidField} for non-increasing timestamps.
SuddenEventCounts detect_sudden_events(std::span<const TrajectoryPoint> trajectory,
                                       const SuddenEventConfig& cfg);

enum class AvSudClass { kLow, kHigh };

struct AvSudScore {
  double value = 0.0;
  AvSudClass cls = AvSudClass::kLow;
};

inline constexpr double kDefaultAvSudThreshold = 0.1;

// value = sud_brk / n + chg_loc / n; High iff value >= threshold.
// Throws Error{kZeroObservations} when n == 0.
AvSudScore compute_avsud(const SuddenEventCounts& counts,
                         double threshold = kDefaultAvSudThreshold);

AvSudClass classify_avsud(double value, double threshold = kDefaultAvSudThreshold);

enum class Decision { kNotPreferred, kNotPreferredDanger, kPreferred };

// Traffic prediction decision matrix:
//   slower, High -> NotPreferred
//   slower, Low  -> NotPreferred
//   faster, High -> NotPreferredDanger
//   faster, Low  -> Preferred
Decision decide(bool faster, AvSudClass avsud_class);

struct ChoiceVerdict {
  std::uint32_t choice_id = 0;
  int lane_index = 0;
  Decision decision = Decision::kNotPreferred;
  // Absent when nobody was around the gap.
  std::optional<double> aavs_mps;
  AvSudClass avsud_class = AvSudClass::kLow;

  friend bool operator==(const ChoiceVerdict&, const ChoiceVerdict&) = default;
};

// Preferred < NotPreferred < NotPreferredDanger, then fewest lane crossings
// from the decider's lane, then lower choice_id.
std::vector<ChoiceVerdict> rank_choices(std::vector<ChoiceVerdict> verdicts, int decider_lane);

}  // namespace lanesel
