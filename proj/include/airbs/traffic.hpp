#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "airbs/channel.hpp"
#include "airbs/geometry.hpp"
#include "airbs/rng.hpp"
#include "airbs/utility.hpp"

namespace airbs {

/// Share of downlink packets addressed to each MU.
class TrafficProfile {
 public:
  /// Throws InvalidArgument unless entries are >= 0 and sum to 1 within 1e-9.
  explicit TrafficProfile(std::vector<double> shares);

  static TrafficProfile uniform(std::size_t num_users);

  std::size_t size() const { return shares_.size(); }
  double share(std::size_t m) const { return shares_.at(m); }
  const std::vector<double>& shares() const { return shares_; }

  /// Index of the next packet recipient, P(m) = share(m).
  std::size_t sample_recipient(Rng& rng) const;

  /// Pairs each location with its share; sizes must match.
  std::vector<WeightedUser> weighted_users(std::span<const Position> locations) const;

 private:
  std::vector<double> shares_;
  std::vector<double> cumulative_;
  bool uniform_ = false;
};

/// What an MU broadcasts on the control channel after receiving a packet:
/// its location and the powers it measured from every AirBS beacon.
struct ControlPacket {
  std::size_t mu_index = 0;
  Position mu_location;
  std::vector<double> measured_powers_dbm;
};

/// Additive Gaussian error on reported powers, dB. Zero disables it.
struct MeasurementNoise {
  double sigma_db = 0.0;
  friend bool operator==(const MeasurementNoise&, const MeasurementNoise&) = default;
};

/// Builds the control packet MU `m` would send for the current placement.
/// AirBS state is read only through `channel`.
ControlPacket make_control_packet(std::size_t m, std::span<const Position> mus,
                                  std::span<const Placement> placements, const ChannelModel& channel);

/// Same, with measurement noise drawn from `rng` when enabled.
ControlPacket make_control_packet(std::size_t m, std::span<const Position> mus,
                                  std::span<const Placement> placements, const ChannelModel& channel,
                                  MeasurementNoise noise, Rng& rng);

/// Sample mean (1/S) sum_s J_{m[s]} computed from packet contents alone.
double empirical_utility_estimate(std::span<const ControlPacket> packets, const UtilityConfig& cfg);

}  // namespace airbs
