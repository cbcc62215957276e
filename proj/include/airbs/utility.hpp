#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "airbs/channel.hpp"
#include "airbs/geometry.hpp"

namespace airbs {

enum class UtilityFamily {
  UnicastRate,                // log2(1 + max_b p_b / N0), max smoothed
  BroadcastRate,              // log2(1 + sum_b p_b / N0)
  ThresholdSigmoidUnicast,    // sigma_delta(smooth max - p_min)
  ThresholdSigmoidBroadcast,  // sigma_delta(power sum in dBm - p_min)
};

std::string_view to_string(UtilityFamily family);
/// Accepts the snake_case names produced by to_string.
UtilityFamily utility_family_from_string(std::string_view name);

struct UtilityConfig {
  UtilityFamily family = UtilityFamily::ThresholdSigmoidUnicast;
  double noise_dbm = -112.4;
  double p_min_dbm = -91.0;
  double delta_db = 2.0;
  /// Log-sum-exp temperature on dBm-scale powers, 1/dB.
  double softmax_alpha = 1.0;

  void validate() const;
  friend bool operator==(const UtilityConfig&, const UtilityConfig&) = default;
};

/// (1/alpha) ln sum_b exp(alpha p_b), evaluated relative to the maximum.
double smooth_max_dbm(std::span<const double> powers_dbm, double alpha);

/// Gradient of smooth_max_dbm with respect to each power.
std::vector<double> softmax_weights(std::span<const double> powers_dbm, double alpha);

/// sigma(6x/delta - 3): logistic transition between x = 0 and x = delta.
double sigmoid_delta(double x, double delta);
double sigmoid_delta_deriv(double x, double delta);

/// Incoherent sum of powers, dBm.
double power_sum_dbm(std::span<const double> powers_dbm);

/// Smooth per-user utility f(p_1, ..., p_B). This is what the agents ascend.
double user_utility(std::span<const double> powers_dbm, const UtilityConfig& cfg);

/// Partial derivatives of user_utility with respect to each p_b in dB, 1/dB.
std::vector<double> user_utility_partials(std::span<const double> powers_dbm, const UtilityConfig& cfg);

/// Non-surrogate counterpart: exact max, and a unit step (p >= p_min) for the
/// threshold families.
double exact_user_utility(std::span<const double> powers_dbm, const UtilityConfig& cfg);

struct WeightedUser {
  Position location;
  double weight = 0.0;
};

/// Uniform traffic weights 1/M.
std::vector<WeightedUser> uniform_users(std::span<const Position> locations);

/// sum_m pi_m J_m(l). Weights must be nonnegative and sum to one (1e-9).
double network_utility(std::span<const Placement> placements, std::span<const WeightedUser> users,
                       const UtilityConfig& cfg, const ChannelModel& channel);

/// Same weighting over exact_user_utility.
double exact_network_utility(std::span<const Placement> placements, std::span<const WeightedUser> users,
                             const UtilityConfig& cfg, const ChannelModel& channel);

/// Full-information gradient, one block per AirBS. With `horizontal_only`
/// the vertical components are zeroed, matching fixed-height agents.
std::vector<Vec3> network_utility_gradient(std::span<const Placement> placements,
                                           std::span<const WeightedUser> users, const UtilityConfig& cfg,
                                           const ChannelModel& channel, bool horizontal_only = false);

}  // namespace airbs
