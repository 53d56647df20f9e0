#pragma once

// Wire format of the periodic vehicle status beacon.
//
// Every field is big-endian, packed with no padding, in this order:
//
//   offset  width  field
//   0       4      seq            u32
//   4       2      interval_ms    u16   [100, 500]
//   6       8      timestamp_ms   u64
//   14      8      elp            u64
//   22      4      pos_x_cm       i32
//   26      4      pos_y_cm       i32
//   30      2      speed_cms      i16   sign = direction along the corridor axis
//   32      2      dir_cdeg       u16   [0, 36000)
//   34      2      max_p_cdbm     i16
//   36      2      min_p_cdbm     i16   <= max_p_cdbm
//   38      2      pow_u_cdbm     i16
//   40      ...    piggyback      opaque, zero padded to the message size
//
// Safety beacons are 100 bytes. Non-safety messages (512 bytes) reuse the
// same 40-byte header with a 472-byte body.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

namespace lanesel {

inline constexpr std::size_t kHeaderBytes = 40;
inline constexpr std::size_t kSafetyMessageBytes = 100;
inline constexpr std::size_t kNonSafetyMessageBytes = 512;
inline constexpr std::size_t kPiggybackBytes = kSafetyMessageBytes - kHeaderBytes;
inline constexpr std::size_t kNonSafetyBodyBytes = kNonSafetyMessageBytes - kHeaderBytes;

inline constexpr std::uint16_t kMinBeaconIntervalMs = 100;
inline constexpr std::uint16_t kMaxBeaconIntervalMs = 500;
inline constexpr std::uint16_t kFullCircleCdeg = 36000;

struct BeaconHeader {
  std::uint32_t seq = 0;
  std::uint16_t interval_ms = kMinBeaconIntervalMs;
  std::uint64_t timestamp_ms = 0;
  std::uint64_t elp = 0;
  std::int32_t pos_x_cm = 0;
  std::int32_t pos_y_cm = 0;
  std::int16_t speed_cms = 0;
  std::uint16_t dir_cdeg = 0;
  std::int16_t max_p_cdbm = 0;
  std::int16_t min_p_cdbm = 0;
  std::int16_t pow_u_cdbm = 0;

  friend bool operator==(const BeaconHeader&, const BeaconHeader&) = default;
};

struct Beacon {
  BeaconHeader header;
  std::array<std::uint8_t, kPiggybackBytes> piggyback{};

  friend bool operator==(const Beacon&, const Beacon&) = default;
};

struct NonSafetyMessage {
  BeaconHeader header;
  std::array<std::uint8_t, kNonSafetyBodyBytes> body{};

  friend bool operator==(const NonSafetyMessage&, const NonSafetyMessage&) = default;
};

using BeaconBytes = std::array<std::uint8_t, kSafetyMessageBytes>;
using NonSafetyBytes = std::array<std::uint8_t, kNonSafetyMessageBytes>;

// Throws Error{kInvalidField} when the header breaks a field invariant.
void validate_header(const BeaconHeader& header);

BeaconBytes encode_beacon(const Beacon& beacon);

// Throws Error{kMalformedBeacon} on a length other than 100 bytes or on
// decoded fields that violate the header invariants.
Beacon decode_beacon(std::span<const std::uint8_t> bytes);

NonSafetyBytes encode_message(const NonSafetyMessage& message);
NonSafetyMessage decode_message(std::span<const std::uint8_t> bytes);

}  // namespace lanesel
