#include "lanesel/beacon_codec.hpp"

#include <string>

#include "lanesel/byte_io.hpp"
#include "lanesel/error.hpp"

namespace lanesel {
namespace {

std::string header_violation(const BeaconHeader& h) {
  if (h.interval_ms < kMinBeaconIntervalMs || h.interval_ms > kMaxBeaconIntervalMs) {
    return "interval_ms " + std::to_string(h.interval_ms) + " outside [100, 500]";
  }
  if (h.dir_cdeg >= kFullCircleCdeg) {
    return "dir_cdeg " + std::to_string(h.dir_cdeg) + " >= 36000";
  }
  if (h.max_p_cdbm < h.min_p_cdbm) {
    return "max_p_cdbm < min_p_cdbm";
  }
  return {};
}

void write_header(detail::ByteWriter& w, const BeaconHeader& h) {
  w.put(h.seq);
  w.put(h.interval_ms);
  w.put(h.timestamp_ms);
  w.put(h.elp);
  w.put(h.pos_x_cm);
  w.put(h.pos_y_cm);
  w.put(h.speed_cms);
  w.put(h.dir_cdeg);
  w.put(h.max_p_cdbm);
  w.put(h.min_p_cdbm);
  w.put(h.pow_u_cdbm);
}

BeaconHeader read_header(detail::ByteReader& r) {
  BeaconHeader h;
  h.seq = r.get<std::uint32_t>();
  h.interval_ms = r.get<std::uint16_t>();
  h.timestamp_ms = r.get<std::uint64_t>();
  h.elp = r.get<std::uint64_t>();
  h.pos_x_cm = r.get<std::int32_t>();
  h.pos_y_cm = r.get<std::int32_t>();
  h.speed_cms = r.get<std::int16_t>();
  h.dir_cdeg = r.get<std::uint16_t>();
  h.max_p_cdbm = r.get<std::int16_t>();
  h.min_p_cdbm = r.get<std::int16_t>();
  h.pow_u_cdbm = r.get<std::int16_t>();
  return h;
}

template <std::size_t Total, std::size_t Payload>
std::array<std::uint8_t, Total> encode_framed(const BeaconHeader& header,
                                              const std::array<std::uint8_t, Payload>& payload) {
  static_assert(kHeaderBytes + Payload == Total);
  validate_header(header);
  std::array<std::uint8_t, Total> out{};
  detail::ByteWriter w(out);
  write_header(w, header);
  w.put_bytes(payload);
  return out;
}

template <std::size_t Payload>
BeaconHeader decode_framed(std::span<const std::uint8_t> bytes,
                           std::array<std::uint8_t, Payload>& payload) {
  const std::size_t expected = kHeaderBytes + Payload;
  if (bytes.size() != expected) {
    throw Error(ErrorCode::kMalformedBeacon, "expected " + std::to_string(expected) +
                                                 " bytes, got " + std::to_string(bytes.size()));
  }
  detail::ByteReader r(bytes);
  BeaconHeader header = read_header(r);
  if (auto why = header_violation(header); !why.empty()) {
    throw Error(ErrorCode::kMalformedBeacon, why);
  }
  r.get_bytes(payload);
  return header;
}

}  // namespace

void validate_header(const BeaconHeader& header) {
  if (auto why = header_violation(header); !why.empty()) {
    throw Error(ErrorCode::kInvalidField, why);
  }
}

BeaconBytes encode_beacon(const Beacon& beacon) {
  return encode_framed<kSafetyMessageBytes>(beacon.header, beacon.piggyback);
}

Beacon decode_beacon(std::span<const std::uint8_t> bytes) {
  Beacon b;
  b.header = decode_framed(bytes, b.piggyback);
  return b;
}

NonSafetyBytes encode_message(const NonSafetyMessage& message) {
  return encode_framed<kNonSafetyMessageBytes>(message.header, message.body);
}

NonSafetyMessage decode_message(std::span<const std::uint8_t> bytes) {
  NonSafetyMessage m;
  m.header = decode_framed(bytes, m.body);
  return m;
}

}  // namespace lanesel
