#include "lanesel/oda.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "lanesel/byte_io.hpp"
#include "lanesel/error.hpp"

namespace lanesel {
namespace {

template <typename T>
T to_wire(double value, const char* field) {
  const double rounded = std::round(value);
  if (!std::isfinite(rounded) || rounded < static_cast<double>(std::numeric_limits<T>::min()) ||
      rounded > static_cast<double>(std::numeric_limits<T>::max())) {
    throw Error(ErrorCode::kInvalidField, std::string(field) + " does not fit its wire field");
  }
  return static_cast<T>(rounded);
}

std::uint8_t encode_decision(Decision d) {
  switch (d) {
    case Decision::kNotPreferred: return 0;
    case Decision::kNotPreferredDanger: return 1;
    case Decision::kPreferred: return 2;
  }
  return 0;
}

Decision decode_decision(std::uint8_t raw) {
  switch (raw) {
    case 0: return Decision::kNotPreferred;
    case 1: return Decision::kNotPreferredDanger;
    case 2: return Decision::kPreferred;
    default: throw Error(ErrorCode::kMalformedBeacon, "unknown decision code");
  }
}

}  // namespace

NonSafetyBytes encode_oda_request(const OdaRequest& request) {
  if (request.candidate_gaps.empty() || request.candidate_gaps.size() > kMaxOdaGaps) {
    throw Error(ErrorCode::kInvalidField, "gap count must be in [1, 31]");
  }
  NonSafetyMessage msg;
  msg.header = request.decider_beacon.header;
  msg.header.elp = request.decider_elp;
  detail::ByteWriter w(msg.body);
  w.put(kOdaRequestType);
  w.put(to_wire<std::uint16_t>(request.decider_acs_mps * 100.0, "decider_acs"));
  w.put(static_cast<std::uint8_t>(request.candidate_gaps.size()));
  for (const auto& g : request.candidate_gaps) {
    w.put(to_wire<std::uint16_t>(g.choice_id, "choice_id"));
    w.put(to_wire<std::uint8_t>(g.lane_index, "lane_index"));
    w.put(to_wire<std::int32_t>(g.center_pos.x * 100.0, "center_x"));
    w.put(to_wire<std::int32_t>(g.center_pos.y * 100.0, "center_y"));
    w.put(to_wire<std::uint32_t>(g.length_m * 100.0, "length"));
  }
  return encode_message(msg);
}

OdaRequest decode_oda_request(std::span<const std::uint8_t> bytes) {
  const NonSafetyMessage msg = decode_message(bytes);
  detail::ByteReader r(msg.body);
  if (r.get<std::uint8_t>() != kOdaRequestType) {
    throw Error(ErrorCode::kMalformedBeacon, "not an ODA request");
  }
  OdaRequest req;
  req.decider_elp = msg.header.elp;
  req.decider_beacon.header = msg.header;
  req.decider_acs_mps = r.get<std::uint16_t>() / 100.0;
  const auto count = r.get<std::uint8_t>();
  if (count == 0 || count > kMaxOdaGaps) {
    throw Error(ErrorCode::kMalformedBeacon, "gap count must be in [1, 31]");
  }
  for (std::uint8_t i = 0; i < count; ++i) {
    GapDescriptor g;
    g.choice_id = r.get<std::uint16_t>();
    g.lane_index = r.get<std::uint8_t>();
    g.center_pos.x = r.get<std::int32_t>() / 100.0;
    g.center_pos.y = r.get<std::int32_t>() / 100.0;
    g.length_m = r.get<std::uint32_t>() / 100.0;
    req.candidate_gaps.push_back(g);
  }
  return req;
}

NonSafetyBytes encode_oda_response(const OdaResponse& response, const BeaconHeader& rsu_header) {
  if (response.verdicts.size() > kMaxOdaVerdicts) {
    throw Error(ErrorCode::kInvalidField, "too many verdicts for one message");
  }
  NonSafetyMessage msg;
  msg.header = rsu_header;
  detail::ByteWriter w(msg.body);
  w.put(kOdaResponseType);
  w.put(response.decider_elp);
  w.put(response.issued_at_ms);
  w.put(static_cast<std::uint8_t>(response.verdicts.size()));
  for (const auto& v : response.verdicts) {
    w.put(to_wire<std::uint16_t>(v.choice_id, "choice_id"));
    w.put(to_wire<std::uint8_t>(v.lane_index, "lane_index"));
    w.put(encode_decision(v.decision));
    w.put(static_cast<std::uint8_t>(v.avsud_class == AvSudClass::kHigh ? 1 : 0));
    if (v.aavs_mps) {
      const auto cms = to_wire<std::uint16_t>(*v.aavs_mps * 100.0, "aavs");
      if (cms == kAbsentAavs) throw Error(ErrorCode::kInvalidField, "aavs collides with sentinel");
      w.put(cms);
    } else {
      w.put(kAbsentAavs);
    }
  }
  return encode_message(msg);
}

OdaResponse decode_oda_response(std::span<const std::uint8_t> bytes) {
  const NonSafetyMessage msg = decode_message(bytes);
  detail::ByteReader r(msg.body);
  if (r.get<std::uint8_t>() != kOdaResponseType) {
    throw Error(ErrorCode::kMalformedBeacon, "not an ODA response");
  }
  OdaResponse resp;
  resp.decider_elp = r.get<std::uint64_t>();
  resp.issued_at_ms = r.get<std::uint64_t>();
  const auto count = r.get<std::uint8_t>();
  if (count > kMaxOdaVerdicts) throw Error(ErrorCode::kMalformedBeacon, "verdict count too large");
  for (std::uint8_t i = 0; i < count; ++i) {
    ChoiceVerdict v;
    v.choice_id = r.get<std::uint16_t>();
    v.lane_index = r.get<std::uint8_t>();
    v.decision = decode_decision(r.get<std::uint8_t>());
    const auto cls = r.get<std::uint8_t>();
    if (cls > 1) throw Error(ErrorCode::kMalformedBeacon, "unknown AvSud class");
    v.avsud_class = cls == 1 ? AvSudClass::kHigh : AvSudClass::kLow;
    const auto aavs = r.get<std::uint16_t>();
    if (aavs != kAbsentAavs) v.aavs_mps = aavs / 100.0;
    resp.verdicts.push_back(v);
  }
  return resp;
}

}  // namespace lanesel
