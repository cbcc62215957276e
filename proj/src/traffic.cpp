#include "airbs/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "airbs/error.hpp"

namespace airbs {

TrafficProfile::TrafficProfile(std::vector<double> shares) : shares_(std::move(shares)) {
  if (shares_.empty()) throw InvalidArgument("traffic profile must cover at least one MU");
  double total = 0.0;
  cumulative_.reserve(shares_.size());
  for (double s : shares_) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw InvalidArgument("traffic shares must be finite and nonnegative");
    total += s;
    cumulative_.push_back(total);
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InvalidArgument("traffic shares must sum to 1 (got " + std::to_string(total) + ")");
  }
  uniform_ = std::all_of(shares_.begin(), shares_.end(), [&](double s) { return s == shares_.front(); });
}

TrafficProfile TrafficProfile::uniform(std::size_t num_users) {
  if (num_users == 0) throw InvalidArgument("traffic profile must cover at least one MU");
  return TrafficProfile(std::vector<double>(num_users, 1.0 / static_cast<double>(num_users)));
}

std::size_t TrafficProfile::sample_recipient(Rng& rng) const {
  if (uniform_) return rng.index(shares_.size());
  // Scale by the accumulated total so a sum of 1 - 1e-12 cannot overflow the table.
  const double u = rng.uniform() * cumulative_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  // First strictly greater cumulative value, so zero-share entries are never hit.
  return std::min(static_cast<std::size_t>(it - cumulative_.begin()), shares_.size() - 1);
}

std::vector<WeightedUser> TrafficProfile::weighted_users(std::span<const Position> locations) const {
  if (locations.size() != shares_.size()) {
    throw InvalidArgument("traffic profile covers " + std::to_string(shares_.size()) + " MUs, got " +
                          std::to_string(locations.size()) + " locations");
  }
  std::vector<WeightedUser> users;
  users.reserve(locations.size());
  for (std::size_t m = 0; m < locations.size(); ++m) users.push_back({locations[m], shares_[m]});
  return users;
}

ControlPacket make_control_packet(std::size_t m, std::span<const Position> mus,
                                  std::span<const Placement> placements, const ChannelModel& channel) {
  if (m >= mus.size()) {
    throw InvalidArgument("MU index " + std::to_string(m) + " out of range [0, " + std::to_string(mus.size()) + ")");
  }
  return ControlPacket{m, mus[m], received_powers_dbm(placements, mus[m], channel)};
}

ControlPacket make_control_packet(std::size_t m, std::span<const Position> mus,
                                  std::span<const Placement> placements, const ChannelModel& channel,
                                  MeasurementNoise noise, Rng& rng) {
  auto packet = make_control_packet(m, mus, placements, channel);
  if (noise.sigma_db > 0.0) {
    for (double& p : packet.measured_powers_dbm) p += noise.sigma_db * rng.normal();
  }
  return packet;
}

double empirical_utility_estimate(std::span<const ControlPacket> packets, const UtilityConfig& cfg) {
  if (packets.empty()) throw InvalidArgument("utility estimate needs at least one packet");
  double total = 0.0;
  for (const auto& packet : packets) total += user_utility(packet.measured_powers_dbm, cfg);
  return total / static_cast<double>(packets.size());
}

}  // namespace airbs
