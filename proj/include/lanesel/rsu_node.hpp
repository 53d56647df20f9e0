#pragma once

#include <cstdint>
#include <map>
#include <optional>

#include "lanesel/beacon_codec.hpp"
#include "lanesel/corridor.hpp"
#include "lanesel/oda.hpp"
#include "lanesel/traffic_analytics.hpp"

namespace lanesel {

struct RsuConfig {
  double coverage_radius_m = 300.0;
  // Ten missed beacons at the 100 ms minimum interval.
  std::uint64_t expiry_ms = 1000;
  std::size_t window_capacity = SpeedWindow::kDefaultCapacity;
  std::uint64_t window_max_age_ms = SpeedWindow::kDefaultMaxAgeMs;
  SuddenEventConfig events;
  double avsud_threshold = kDefaultAvSudThreshold;
  double neighborhood_radius_m = 100.0;
};

struct VehicleRecord {
  std::uint64_t elp = 0;
  SpeedWindow speed_window;
  Vec2 last_pos;
  int last_lane = 0;
  SuddenEventCounts event_counts;
  std::uint32_t last_seq = 0;
  std::uint64_t last_timestamp_ms = 0;
  double last_speed_mps = 0.0;
  // Beacons implied lost by gaps in the sequence numbers.
  std::uint64_t missed_beacons = 0;
};

// Roadside unit: keeps a registry of the vehicles it hears and answers ODA
// requests against it. Not thread-safe; one owner at a time.
class RsuNode {
 public:
  RsuNode(std::uint32_t id, Vec2 position, RsuConfig config, CorridorConfig corridor);

  // Returns false when the beacon was dropped as a duplicate or out of
  // order (seq <= last seen). Throws Error{kOutOfRange} when the sender is
  // beyond the coverage radius and Error{kInvalidField} on an invalid header.
  bool ingest_beacon(const Beacon& beacon, std::uint64_t now_ms);

  // Forgets every vehicle whose newest beacon is older than the expiry window.
  void expire_stale(std::uint64_t now_ms);

  // Registered vehicles within radius_m of the gap centre travelling in the
  // gap lane's direction, excluding exclude_elp.
  FleetSnapshot neighborhood(const GapDescriptor& gap, double radius_m,
                             std::optional<std::uint64_t> exclude_elp = std::nullopt) const;

  // Judges every candidate gap with the decision matrix and ranks them.
  // Throws Error{kNoCandidates}, Error{kUnknownDecider}, or
  // Error{kInvalidField} for a gap with a bad lane, length, or direction.
  OdaResponse handle_oda(const OdaRequest& request, std::uint64_t now_ms) const;

  std::uint32_t id() const { return id_; }
  Vec2 position() const { return position_; }
  const RsuConfig& config() const { return config_; }
  const std::map<std::uint64_t, VehicleRecord>& registry() const { return registry_; }
  std::uint64_t clock_ms() const { return clock_ms_; }

  // Header this RSU stamps on messages it originates.
  BeaconHeader make_header(std::uint32_t seq, std::uint64_t now_ms) const;

 private:
  std::uint32_t id_;
  Vec2 position_;
  RsuConfig config_;
  CorridorConfig corridor_;
  std::map<std::uint64_t, VehicleRecord> registry_;
  std::uint64_t clock_ms_ = 0;
};

}  // namespace lanesel
