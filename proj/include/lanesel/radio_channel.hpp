#pragma once

// Abstracted DSRC channel: range gating, TDMA slot collisions, and
// Nakagami-m fading on top of power-law path loss.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "lanesel/corridor.hpp"

namespace lanesel {

using Rng = std::mt19937_64;

struct ChannelConfig {
  double tx_range_m = 300.0;
  int slots_per_frame = 10;
  double slot_ms = 2.5;
  double nakagami_m = 3.0;
  double path_loss_exponent = 2.5;
  double data_rate_mbps = 6.0;
  double tx_power_dbm = 20.0;

  double frame_ms() const { return slots_per_frame * slot_ms; }
};

// Throws Error{kInvalidConfig} naming the offending field.
void validate(const ChannelConfig& cfg);

struct TxEvent {
  std::uint64_t sender_elp = 0;
  int slot_index = 0;
  std::uint64_t frame_index = 0;
  std::uint32_t payload_bytes = 100;
  Vec2 sender_pos;

  friend bool operator==(const TxEvent&, const TxEvent&) = default;
};

struct Receiver {
  std::uint64_t id = 0;
  Vec2 pos;
};

struct Delivery {
  std::uint64_t receiver_id = 0;
  TxEvent event;

  friend bool operator==(const Delivery&, const Delivery&) = default;
};

struct RsuSite {
  std::uint32_t id = 0;
  Vec2 pos;
};

// Hash of (elp, frame) reduced modulo the slot count.
int assign_slot(std::uint64_t elp, std::uint64_t frame_index, const ChannelConfig& cfg);

// Probability that a single, uncollided transmission over distance d is
// received: the upper regularised incomplete gamma Q(m, q (d / R)^alpha),
// with q chosen so that the probability at the transmission range R is 0.5.
// Zero beyond R.
double delivery_probability(double distance_m, const ChannelConfig& cfg);

// Mean received power under the path-loss model, dBm, referenced to 1 m.
double mean_rx_power_dbm(double distance_m, const ChannelConfig& cfg);

// Resolves one TDMA frame. For every receiver, in receiver then event order:
// out-of-range events are ignored; in-range events sharing a slot collide and
// are all lost; the rest survive a Nakagami fading draw. Deterministic for a
// given rng state.
std::vector<Delivery> resolve_frame(std::span<const TxEvent> events,
                                    std::span<const Receiver> receivers,
                                    const ChannelConfig& cfg, Rng& rng);

// Closest RSU within range; ties go to the lower id.
std::optional<std::uint32_t> nearest_rsu(Vec2 pos, std::span<const RsuSite> rsus,
                                         const ChannelConfig& cfg);

}  // namespace lanesel
