#include "lanesel/radio_channel.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "lanesel/error.hpp"

namespace lanesel {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Normalised fading threshold at distance d: a unit-mean Gamma(m, 1/m) gain
// must reach this value for the frame to decode.
double median_gain_threshold(const ChannelConfig& cfg) {
  return boost::math::gamma_q_inv(cfg.nakagami_m, 0.5) / cfg.nakagami_m;
}

double gain_threshold(double distance_m, const ChannelConfig& cfg, double at_range) {
  return at_range * std::pow(distance_m / cfg.tx_range_m, cfg.path_loss_exponent);
}

}  // namespace

void validate(const ChannelConfig& cfg) {
  if (!(cfg.tx_range_m > 0.0)) throw Error(ErrorCode::kInvalidConfig, "tx_range_m must be > 0");
  if (cfg.slots_per_frame < 1) throw Error(ErrorCode::kInvalidConfig, "slots_per_frame must be >= 1");
  if (!(cfg.slot_ms > 0.0)) throw Error(ErrorCode::kInvalidConfig, "slot_ms must be > 0");
  if (!(cfg.nakagami_m >= 0.5)) throw Error(ErrorCode::kInvalidConfig, "nakagami_m must be >= 0.5");
  if (!(cfg.path_loss_exponent > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "path_loss_exponent must be > 0");
  }
  if (!(cfg.data_rate_mbps > 0.0)) throw Error(ErrorCode::kInvalidConfig, "data_rate_mbps must be > 0");
}

int assign_slot(std::uint64_t elp, std::uint64_t frame_index, const ChannelConfig& cfg) {
  if (cfg.slots_per_frame <= 1) return 0;
  const std::uint64_t h = splitmix64(splitmix64(elp) ^ frame_index);
  return static_cast<int>(h % static_cast<std::uint64_t>(cfg.slots_per_frame));
}

double delivery_probability(double distance_m, const ChannelConfig& cfg) {
  if (distance_m > cfg.tx_range_m) return 0.0;
  if (distance_m <= 0.0) return 1.0;
  const double t = gain_threshold(distance_m, cfg, median_gain_threshold(cfg));
  return boost::math::gamma_q(cfg.nakagami_m, cfg.nakagami_m * t);
}

double mean_rx_power_dbm(double distance_m, const ChannelConfig& cfg) {
  const double d = std::max(distance_m, 1.0);
  return cfg.tx_power_dbm - 10.0 * cfg.path_loss_exponent * std::log10(d);
}

std::vector<Delivery> resolve_frame(std::span<const TxEvent> events,
                                    std::span<const Receiver> receivers,
                                    const ChannelConfig& cfg, Rng& rng) {
  std::vector<Delivery> out;
  if (events.empty()) return out;
  std::gamma_distribution<double> fading(cfg.nakagami_m, 1.0 / cfg.nakagami_m);
  const double at_range = median_gain_threshold(cfg);
  std::vector<int> occupancy(static_cast<std::size_t>(cfg.slots_per_frame));
  for (const auto& rx : receivers) {
    std::fill(occupancy.begin(), occupancy.end(), 0);
    for (const auto& ev : events) {
      if (distance(ev.sender_pos, rx.pos) <= cfg.tx_range_m) ++occupancy[ev.slot_index];
    }
    for (const auto& ev : events) {
      const double d = distance(ev.sender_pos, rx.pos);
      if (d > cfg.tx_range_m || occupancy[ev.slot_index] > 1) continue;
      // One draw per surviving link keeps the stream aligned with the
      // link order regardless of the outcome.
      const double gain = fading(rng);
      if (gain >= gain_threshold(d, cfg, at_range)) out.push_back({rx.id, ev});
    }
  }
  return out;
}

std::optional<std::uint32_t> nearest_rsu(Vec2 pos, std::span<const RsuSite> rsus,
                                         const ChannelConfig& cfg) {
  std::optional<std::uint32_t> best;
  double best_d = 0.0;
  for (const auto& r : rsus) {
    const double d = distance(pos, r.pos);
    if (d > cfg.tx_range_m) continue;
    if (!best || d < best_d || (d == best_d && r.id < *best)) {
      best = r.id;
      best_d = d;
    }
  }
  return best;
}

}  // namespace lanesel
