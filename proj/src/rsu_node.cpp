#include "lanesel/rsu_node.hpp"

#include <cmath>
#include <string>

#include "lanesel/error.hpp"

namespace lanesel {

RsuNode::RsuNode(std::uint32_t id, Vec2 position, RsuConfig config, CorridorConfig corridor)
    : id_(id), position_(position), config_(config), corridor_(corridor) {}

bool RsuNode::ingest_beacon(const Beacon& beacon, std::uint64_t now_ms) {
  const BeaconHeader& h = beacon.header;
  validate_header(h);
  const Vec2 pos{h.pos_x_cm / 100.0, h.pos_y_cm / 100.0};
  if (distance(pos, position_) > config_.coverage_radius_m) {
    throw Error(ErrorCode::kOutOfRange, "sender " + std::to_string(h.elp) + " beyond coverage of RSU " +
                                            std::to_string(id_));
  }
  if (now_ms > clock_ms_) clock_ms_ = now_ms;

  const double speed = std::abs(h.speed_cms / 100.0);
  const int lane = corridor_.lane_from_y(pos.y);

  auto it = registry_.find(h.elp);
  if (it == registry_.end()) {
    VehicleRecord rec{.elp = h.elp,
                      .speed_window = SpeedWindow(config_.window_capacity, config_.window_max_age_ms)};
    rec.speed_window.push({h.timestamp_ms, speed});
    rec.last_pos = pos;
    rec.last_lane = lane;
    rec.last_seq = h.seq;
    rec.last_timestamp_ms = h.timestamp_ms;
    rec.last_speed_mps = speed;
    registry_.emplace(h.elp, std::move(rec));
    return true;
  }

  VehicleRecord& rec = it->second;
  if (h.seq <= rec.last_seq || h.timestamp_ms <= rec.last_timestamp_ms) return false;

  rec.missed_beacons += h.seq - rec.last_seq - 1;
  rec.speed_window.push({h.timestamp_ms, speed});
  rec.event_counts.accumulate({rec.last_timestamp_ms, rec.last_speed_mps, rec.last_lane},
                              {h.timestamp_ms, speed, lane}, config_.events);
  rec.last_pos = pos;
  rec.last_lane = lane;
  rec.last_seq = h.seq;
  rec.last_timestamp_ms = h.timestamp_ms;
  rec.last_speed_mps = speed;
  return true;
}

void RsuNode::expire_stale(std::uint64_t now_ms) {
  if (now_ms > clock_ms_) clock_ms_ = now_ms;
  std::erase_if(registry_, [&](const auto& kv) {
    return kv.second.last_timestamp_ms + config_.expiry_ms < now_ms;
  });
}

FleetSnapshot RsuNode::neighborhood(const GapDescriptor& gap, double radius_m,
                                    std::optional<std::uint64_t> exclude_elp) const {
  FleetSnapshot snap;
  const Direction dir = corridor_.direction_of(gap.lane_index);
  for (const auto& [elp, rec] : registry_) {
    if (exclude_elp && elp == *exclude_elp) continue;
    if (corridor_.direction_of(rec.last_lane) != dir) continue;
    if (distance(rec.last_pos, gap.center_pos) > radius_m) continue;
    FleetEntry entry{.elp = elp, .acs_mps = compute_acs(rec.speed_window)};
    if (rec.event_counts.n > 0) entry.avsud = compute_avsud(rec.event_counts).value;
    snap.vehicles.push_back(entry);
  }
  return snap;
}

OdaResponse RsuNode::handle_oda(const OdaRequest& request, std::uint64_t now_ms) const {
  if (request.candidate_gaps.empty()) {
    throw Error(ErrorCode::kNoCandidates, "ODA without candidate gaps");
  }
  auto decider = registry_.find(request.decider_elp);
  if (decider == registry_.end()) {
    throw Error(ErrorCode::kUnknownDecider,
                "vehicle " + std::to_string(request.decider_elp) + " not registered at RSU " +
                    std::to_string(id_));
  }
  const int decider_lane = decider->second.last_lane;

  std::vector<ChoiceVerdict> verdicts;
  verdicts.reserve(request.candidate_gaps.size());
  for (const auto& gap : request.candidate_gaps) {
    if (!corridor_.valid_lane(gap.lane_index) || !(gap.length_m > 0.0) ||
        !corridor_.same_direction(gap.lane_index, decider_lane)) {
      throw Error(ErrorCode::kInvalidField, "invalid gap " + std::to_string(gap.choice_id));
    }
    ChoiceVerdict v{.choice_id = gap.choice_id, .lane_index = gap.lane_index};
    const FleetSnapshot around =
        neighborhood(gap, config_.neighborhood_radius_m, request.decider_elp);
    if (around.empty()) {
      // Nobody around the gap: no modelled risk.
      v.decision = Decision::kPreferred;
    } else {
      const double aavs = compute_aavs(around);
      double avsud_sum = 0.0;
      std::size_t observed = 0;
      for (const auto& e : around.vehicles) {
        if (e.avsud) {
          avsud_sum += *e.avsud;
          ++observed;
        }
      }
      const double mean_avsud = observed ? avsud_sum / static_cast<double>(observed) : 0.0;
      v.aavs_mps = aavs;
      v.avsud_class = classify_avsud(mean_avsud, config_.avsud_threshold);
      v.decision = decide(analyse_speed(request.decider_acs_mps, aavs), v.avsud_class);
    }
    verdicts.push_back(v);
  }
  return OdaResponse{.decider_elp = request.decider_elp,
                     .verdicts = rank_choices(std::move(verdicts), decider_lane),
                     .issued_at_ms = now_ms};
}

BeaconHeader RsuNode::make_header(std::uint32_t seq, std::uint64_t now_ms) const {
  BeaconHeader h;
  h.seq = seq;
  h.timestamp_ms = now_ms;
  h.elp = id_;
  h.pos_x_cm = static_cast<std::int32_t>(std::lround(position_.x * 100.0));
  h.pos_y_cm = static_cast<std::int32_t>(std::lround(position_.y * 100.0));
  return h;
}

}  // namespace lanesel
