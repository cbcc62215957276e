#pragma once

#include <span>
#include <vector>

#include "airbs/geometry.hpp"

namespace airbs {

/// Coincidence guard for the free-space singularity, meters.
inline constexpr double kMinSeparationM = 0.1;

/// Link budget of one AirBS towards any MU.
///
/// The antenna gain is folded into `ref_gain_db`; for free space the received
/// power is tx_power_dbm + ref_gain_db - 20 log10(d / ref_distance_m).
struct ChannelParams {
  double ref_gain_db = -94.0;
  double ref_distance_m = 1000.0;
  double tx_power_dbm = 0.0;

  void validate() const;
  friend bool operator==(const ChannelParams&, const ChannelParams&) = default;
};

/// Received power and its gradient with respect to the transmitter location.
///
/// Implementations must be differentiable in `bs` away from `bs == mu`.
class ChannelModel {
 public:
  virtual ~ChannelModel() = default;

  /// Received power at `mu` from an AirBS at `bs`, dBm.
  virtual double power_dbm(const Position& bs, const Position& mu, const ChannelParams& params) const = 0;

  /// Gradient of power_dbm with respect to `bs`, dB/m.
  virtual Vec3 power_gradient(const Position& bs, const Position& mu, const ChannelParams& params) const = 0;
};

class FreeSpaceChannel final : public ChannelModel {
 public:
  double power_dbm(const Position& bs, const Position& mu, const ChannelParams& params) const override;
  Vec3 power_gradient(const Position& bs, const Position& mu, const ChannelParams& params) const override;
};

/// Shared stateless instance.
const FreeSpaceChannel& free_space_channel();

double free_space_power_dbm(const Position& bs, const Position& mu, const ChannelParams& params);

/// -(20 / ln 10) (bs - mu) / |bs - mu|^2; points from `bs` towards `mu`.
Vec3 free_space_power_gradient(const Position& bs, const Position& mu, const ChannelParams& params);

/// One AirBS as seen by the channel: where it is and its link budget.
struct Placement {
  Position position;
  ChannelParams params;
};

/// Per-AirBS received power at `mu`, in placement order.
std::vector<double> received_powers_dbm(std::span<const Placement> placements, const Position& mu,
                                        const ChannelModel& channel);

double dbm_to_linear(double dbm);
/// Throws InvalidArgument for non-positive input.
double linear_to_dbm(double milliwatts);

}  // namespace airbs
