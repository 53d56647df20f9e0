#pragma once

// On-demand analysis (ODA) exchange between a decider vehicle and an RSU.
//
// Both directions travel as 512-byte non-safety messages: the standard
// 40-byte beacon header followed by a typed body.
//
// Request body (header = the decider's current beacon header):
//   u8  type = 0x01
//   u16 decider_acs_cms
//   u8  gap_count (1..31)
//   gap_count x { u16 choice_id, u8 lane_index, i32 center_x_cm,
//                 i32 center_y_cm, u32 length_cm }
//
// Response body (header = the RSU's header, elp = rsu id):
//   u8  type = 0x02
//   u64 decider_elp
//   u64 issued_at_ms
//   u8  verdict_count (0..64)
//   verdict_count x { u16 choice_id, u8 lane_index, u8 decision,
//                     u8 avsud_class, u16 aavs_cms (0xFFFF = absent) }
//
// Speeds and lengths are quantised to centimetres on the wire.

#include <cstdint>
#include <span>
#include <vector>

#include "lanesel/beacon_codec.hpp"
#include "lanesel/corridor.hpp"
#include "lanesel/traffic_analytics.hpp"

namespace lanesel {

struct GapDescriptor {
  std::uint32_t choice_id = 0;
  int lane_index = 0;
  Vec2 center_pos;
  double length_m = 0.0;

  friend bool operator==(const GapDescriptor&, const GapDescriptor&) = default;
};

struct OdaRequest {
  std::uint64_t decider_elp = 0;
  Beacon decider_beacon;
  double decider_acs_mps = 0.0;
  std::vector<GapDescriptor> candidate_gaps;
};

struct OdaResponse {
  std::uint64_t decider_elp = 0;
  std::vector<ChoiceVerdict> verdicts;
  std::uint64_t issued_at_ms = 0;

  friend bool operator==(const OdaResponse&, const OdaResponse&) = default;
};

inline constexpr std::uint8_t kOdaRequestType = 0x01;
inline constexpr std::uint8_t kOdaResponseType = 0x02;
inline constexpr std::size_t kMaxOdaGaps = 31;
inline constexpr std::size_t kMaxOdaVerdicts = 64;
inline constexpr std::uint16_t kAbsentAavs = 0xFFFF;

// Throw Error{kInvalidField} when a value does not fit its wire field.
NonSafetyBytes encode_oda_request(const OdaRequest& request);
NonSafetyBytes encode_oda_response(const OdaResponse& response, const BeaconHeader& rsu_header);

// Throw Error{kMalformedBeacon} on bad framing, type byte or counts.
OdaRequest decode_oda_request(std::span<const std::uint8_t> bytes);
OdaResponse decode_oda_response(std::span<const std::uint8_t> bytes);

}  // namespace lanesel
