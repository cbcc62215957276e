#include "airbs/channel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "airbs/error.hpp"

namespace airbs {

namespace {

constexpr double kTwentyOverLn10 = 20.0 / std::numbers::ln10;

double checked_distance(const Position& bs, const Position& mu) {
  const double d = distance(bs, mu);
  if (!(d >= kMinSeparationM)) {
    throw CoincidentPointsError("AirBS and MU closer than " + std::to_string(kMinSeparationM) +
                                " m (separation " + std::to_string(d) + " m)");
  }
  return d;
}

}  // namespace

void validate_position(const Position& p) {
  if (!is_finite(p)) throw InvalidArgument("position has non-finite coordinates");
  if (p.z < 0.0) throw InvalidArgument("position below ground (z < 0)");
}

void ChannelParams::validate() const {
  if (!(ref_distance_m > 0.0) || !std::isfinite(ref_distance_m)) {
    throw InvalidArgument("channel ref_distance_m must be positive and finite");
  }
  if (!std::isfinite(ref_gain_db)) throw InvalidArgument("channel ref_gain_db must be finite");
  if (!std::isfinite(tx_power_dbm)) throw InvalidArgument("channel tx_power_dbm must be finite");
}

double free_space_power_dbm(const Position& bs, const Position& mu, const ChannelParams& params) {
  const double d = checked_distance(bs, mu);
  return params.tx_power_dbm + params.ref_gain_db - 20.0 * std::log10(d / params.ref_distance_m);
}

Vec3 free_space_power_gradient(const Position& bs, const Position& mu, const ChannelParams& /*params*/) {
  checked_distance(bs, mu);
  const Vec3 offset = bs - mu;
  return offset * (-kTwentyOverLn10 / squared_norm(offset));
}

double FreeSpaceChannel::power_dbm(const Position& bs, const Position& mu, const ChannelParams& params) const {
  return free_space_power_dbm(bs, mu, params);
}

Vec3 FreeSpaceChannel::power_gradient(const Position& bs, const Position& mu, const ChannelParams& params) const {
  return free_space_power_gradient(bs, mu, params);
}

const FreeSpaceChannel& free_space_channel() {
  static const FreeSpaceChannel instance;
  return instance;
}

std::vector<double> received_powers_dbm(std::span<const Placement> placements, const Position& mu,
                                        const ChannelModel& channel) {
  std::vector<double> powers;
  powers.reserve(placements.size());
  for (const auto& site : placements) powers.push_back(channel.power_dbm(site.position, mu, site.params));
  return powers;
}

double dbm_to_linear(double dbm) { return std::pow(10.0, dbm / 10.0); }

double linear_to_dbm(double milliwatts) {
  if (!(milliwatts > 0.0)) throw InvalidArgument("linear power must be positive");
  return 10.0 * std::log10(milliwatts);
}

}  // namespace airbs
