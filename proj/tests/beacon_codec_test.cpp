#include "lanesel/beacon_codec.hpp"

#include <cctype>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "lanesel/oda.hpp"
#include "support/expect_error.hpp"
#include "support/fixtures.hpp"
#include "support/random_beacon.hpp"

namespace lanesel {
namespace {

// Hand-rolled big-endian packer, independent of the codec's writer.
void pack(std::vector<std::uint8_t>& out, std::uint64_t value, int width) {
  for (int i = width - 1; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
}

std::vector<std::uint8_t> reference_bytes(const Beacon& b) {
  const BeaconHeader& h = b.header;
  std::vector<std::uint8_t> out;
  pack(out, h.seq, 4);
  pack(out, h.interval_ms, 2);
  pack(out, h.timestamp_ms, 8);
  pack(out, h.elp, 8);
  pack(out, static_cast<std::uint32_t>(h.pos_x_cm), 4);
  pack(out, static_cast<std::uint32_t>(h.pos_y_cm), 4);
  pack(out, static_cast<std::uint16_t>(h.speed_cms), 2);
  pack(out, h.dir_cdeg, 2);
  pack(out, static_cast<std::uint16_t>(h.max_p_cdbm), 2);
  pack(out, static_cast<std::uint16_t>(h.min_p_cdbm), 2);
  pack(out, static_cast<std::uint16_t>(h.pow_u_cdbm), 2);
  out.insert(out.end(), b.piggyback.begin(), b.piggyback.end());
  return out;
}

std::vector<std::uint8_t> parse_hex(const std::string& text) {
  std::string digits;
  for (char c : text) {
    if (std::isxdigit(static_cast<unsigned char>(c))) digits += c;
  }
  std::vector<std::uint8_t> out;
  for (std::size_t i = 0; i + 1 < digits.size(); i += 2) {
    out.push_back(static_cast<std::uint8_t>(std::stoi(digits.substr(i, 2), nullptr, 16)));
  }
  return out;
}

TEST(BeaconCodec, ZeroBeaconMatchesGoldenHex) {
  const auto golden = parse_hex(testing::read_fixture("zero_beacon.hex"));
  ASSERT_EQ(golden.size(), kSafetyMessageBytes);
  const auto bytes = encode_beacon(Beacon{});
  EXPECT_EQ(std::vector<std::uint8_t>(bytes.begin(), bytes.end()), golden);
}

TEST(BeaconCodec, FieldLayoutMatchesReferencePacker) {
  Beacon b;
  b.header = {.seq = 0x01020304,
              .interval_ms = 250,
              .timestamp_ms = 0x1122334455667788ULL,
              .elp = 0xA1A2A3A4A5A6A7A8ULL,
              .pos_x_cm = -123456,
              .pos_y_cm = 987654,
              .speed_cms = -3050,
              .dir_cdeg = 18000,
              .max_p_cdbm = -4512,
              .min_p_cdbm = -9000,
              .pow_u_cdbm = 2000};
  b.piggyback[0] = 0xEE;
  b.piggyback[59] = 0x7F;
  const auto bytes = encode_beacon(b);
  EXPECT_EQ(std::vector<std::uint8_t>(bytes.begin(), bytes.end()), reference_bytes(b));
  EXPECT_EQ(bytes[0], 0x01);
  EXPECT_EQ(bytes[3], 0x04);
  EXPECT_EQ(bytes[kHeaderBytes], 0xEE);
}

TEST(BeaconCodec, RandomBeaconsRoundTripAndMatchReference) {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 2000; ++i) {
    const Beacon b = testing::random_beacon(rng);
    const auto bytes = encode_beacon(b);
    ASSERT_EQ(bytes.size(), kSafetyMessageBytes);
    ASSERT_EQ(std::vector<std::uint8_t>(bytes.begin(), bytes.end()), reference_bytes(b));
    ASSERT_EQ(decode_beacon(bytes), b);
  }
}

TEST(BeaconCodec, RejectsInvalidFieldsOnEncode) {
  Beacon b;
  b.header.interval_ms = 99;
  EXPECT_LANESEL_ERROR(encode_beacon(b), ErrorCode::kInvalidField);
  b.header.interval_ms = 501;
  EXPECT_LANESEL_ERROR(encode_beacon(b), ErrorCode::kInvalidField);
  b.header.interval_ms = 500;
  b.header.dir_cdeg = 36000;
  EXPECT_LANESEL_ERROR(encode_beacon(b), ErrorCode::kInvalidField);
  b.header.dir_cdeg = 35999;
  b.header.max_p_cdbm = -10;
  b.header.min_p_cdbm = -5;
  EXPECT_LANESEL_ERROR(encode_beacon(b), ErrorCode::kInvalidField);
  b.header.min_p_cdbm = -10;
  EXPECT_NO_THROW(encode_beacon(b));
}

TEST(BeaconCodec, RejectsWrongLengthAndBadDecodedFields) {
  const auto bytes = encode_beacon(Beacon{});
  std::vector<std::uint8_t> shorter(bytes.begin(), bytes.end() - 1);
  EXPECT_LANESEL_ERROR(decode_beacon(shorter), ErrorCode::kMalformedBeacon);
  std::vector<std::uint8_t> longer(bytes.begin(), bytes.end());
  longer.push_back(0);
  EXPECT_LANESEL_ERROR(decode_beacon(longer), ErrorCode::kMalformedBeacon);
  EXPECT_LANESEL_ERROR(decode_beacon(std::span<const std::uint8_t>{}), ErrorCode::kMalformedBeacon);

  auto bad = bytes;
  bad[5] = 0x00;  // interval 0
  EXPECT_LANESEL_ERROR(decode_beacon(bad), ErrorCode::kMalformedBeacon);
  bad = bytes;
  bad[32] = 0xFF;  // direction 0xFF00 >= 36000
  EXPECT_LANESEL_ERROR(decode_beacon(bad), ErrorCode::kMalformedBeacon);
}

TEST(BeaconCodec, NonSafetyMessageIs512BytesWithSharedHeader) {
  std::mt19937_64 rng(7);
  NonSafetyMessage m;
  m.header = testing::random_beacon(rng).header;
  for (auto& byte : m.body) byte = static_cast<std::uint8_t>(rng());
  const auto bytes = encode_message(m);
  EXPECT_EQ(bytes.size(), kNonSafetyMessageBytes);
  EXPECT_EQ(decode_message(bytes), m);

  Beacon as_beacon;
  as_beacon.header = m.header;
  const auto beacon_bytes = encode_beacon(as_beacon);
  EXPECT_TRUE(std::equal(beacon_bytes.begin(), beacon_bytes.begin() + kHeaderBytes, bytes.begin()));
  EXPECT_LANESEL_ERROR(decode_message(beacon_bytes), ErrorCode::kMalformedBeacon);
}

OdaRequest sample_request() {
  OdaRequest req;
  req.decider_elp = 77;
  req.decider_beacon.header.elp = 77;
  req.decider_beacon.header.seq = 12;
  req.decider_beacon.header.timestamp_ms = 4500;
  req.decider_acs_mps = 27.25;
  req.candidate_gaps = {{.choice_id = 1, .lane_index = 2, .center_pos = {120.5, 8.75}, .length_m = 31.2},
                        {.choice_id = 2, .lane_index = 0, .center_pos = {80.0, 1.75}, .length_m = 60.0}};
  return req;
}

TEST(OdaMessages, RequestRoundTripsAtCentimetreResolution) {
  const OdaRequest req = sample_request();
  const auto bytes = encode_oda_request(req);
  EXPECT_EQ(bytes.size(), kNonSafetyMessageBytes);
  const OdaRequest back = decode_oda_request(bytes);
  EXPECT_EQ(back.decider_elp, req.decider_elp);
  EXPECT_EQ(back.decider_beacon.header, req.decider_beacon.header);
  EXPECT_DOUBLE_EQ(back.decider_acs_mps, 27.25);
  EXPECT_EQ(back.candidate_gaps, req.candidate_gaps);
}

TEST(OdaMessages, ResponseRoundTripsIncludingAbsentAavs) {
  OdaResponse resp;
  resp.decider_elp = 77;
  resp.issued_at_ms = 4580;
  resp.verdicts = {{.choice_id = 2, .lane_index = 0, .decision = Decision::kPreferred,
                    .aavs_mps = 24.5, .avsud_class = AvSudClass::kLow},
                   {.choice_id = 1, .lane_index = 2, .decision = Decision::kNotPreferredDanger,
                    .aavs_mps = std::nullopt, .avsud_class = AvSudClass::kHigh}};
  BeaconHeader rsu;
  rsu.elp = 1;
  const auto bytes = encode_oda_response(resp, rsu);
  EXPECT_EQ(decode_oda_response(bytes), resp);
}

TEST(OdaMessages, RejectsBadFraming) {
  OdaRequest req = sample_request();
  req.candidate_gaps.clear();
  EXPECT_LANESEL_ERROR(encode_oda_request(req), ErrorCode::kInvalidField);
  req.candidate_gaps.assign(kMaxOdaGaps + 1, sample_request().candidate_gaps[0]);
  EXPECT_LANESEL_ERROR(encode_oda_request(req), ErrorCode::kInvalidField);

  auto bytes = encode_oda_request(sample_request());
  bytes[kHeaderBytes] = kOdaResponseType;
  EXPECT_LANESEL_ERROR(decode_oda_request(bytes), ErrorCode::kMalformedBeacon);
  EXPECT_LANESEL_ERROR(decode_oda_response(encode_oda_request(sample_request())),
                       ErrorCode::kMalformedBeacon);
}

}  // namespace
}  // namespace lanesel
