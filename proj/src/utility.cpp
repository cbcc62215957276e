#include "airbs/utility.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "airbs/error.hpp"

namespace airbs {

namespace {

// Scale that turns a dB difference into a natural-log ratio of linear powers.
constexpr double kNepersPerDb = std::numbers::ln10 / 10.0;

void require_powers(std::span<const double> powers_dbm) {
  if (powers_dbm.empty()) throw InvalidArgument("power vector must have at least one entry");
  for (double p : powers_dbm) {
    if (!std::isfinite(p)) throw InvalidArgument("power vector has a non-finite entry");
  }
}

void require_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("soft-max temperature must be positive");
}

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// sigma(z) (1 - sigma(z)), written in terms of exp(-|z|) so it never rounds to 0
// before exp underflows.
double logistic_deriv(double z) {
  const double e = std::exp(-std::abs(z));
  return e / ((1.0 + e) * (1.0 + e));
}

// log2(1 + 10^(snr_db / 10)) and its derivative with respect to snr_db.
double rate_from_snr_db(double snr_db) { return std::log1p(dbm_to_linear(snr_db)) / std::numbers::ln2; }
double rate_slope_per_db(double snr_db) {
  const double snr = dbm_to_linear(snr_db);
  return kNepersPerDb * snr / ((1.0 + snr) * std::numbers::ln2);
}

double max_of(std::span<const double> v) { return *std::max_element(v.begin(), v.end()); }

}  // namespace

std::string_view to_string(UtilityFamily family) {
  switch (family) {
    case UtilityFamily::UnicastRate: return "unicast_rate";
    case UtilityFamily::BroadcastRate: return "broadcast_rate";
    case UtilityFamily::ThresholdSigmoidUnicast: return "threshold_sigmoid_unicast";
    case UtilityFamily::ThresholdSigmoidBroadcast: return "threshold_sigmoid_broadcast";
  }
  return "unknown";
}

UtilityFamily utility_family_from_string(std::string_view name) {
  for (auto family : {UtilityFamily::UnicastRate, UtilityFamily::BroadcastRate,
                      UtilityFamily::ThresholdSigmoidUnicast, UtilityFamily::ThresholdSigmoidBroadcast}) {
    if (to_string(family) == name) return family;
  }
  throw InvalidArgument("unknown utility family '" + std::string(name) + "'");
}

void UtilityConfig::validate() const {
  if (!(delta_db > 0.0) || !std::isfinite(delta_db)) throw InvalidArgument("utility delta_db must be positive");
  require_alpha(softmax_alpha);
  if (!std::isfinite(noise_dbm)) throw InvalidArgument("utility noise_dbm must be finite");
  if (!std::isfinite(p_min_dbm)) throw InvalidArgument("utility p_min_dbm must be finite");
}

double smooth_max_dbm(std::span<const double> powers_dbm, double alpha) {
  require_powers(powers_dbm);
  require_alpha(alpha);
  const double top = max_of(powers_dbm);
  double acc = 0.0;
  for (double p : powers_dbm) acc += std::exp(alpha * (p - top));
  return top + std::log(acc) / alpha;
}

std::vector<double> softmax_weights(std::span<const double> powers_dbm, double alpha) {
  require_powers(powers_dbm);
  require_alpha(alpha);
  const double top = max_of(powers_dbm);
  std::vector<double> w(powers_dbm.size());
  double acc = 0.0;
  for (std::size_t b = 0; b < w.size(); ++b) {
    w[b] = std::exp(alpha * (powers_dbm[b] - top));
    acc += w[b];
  }
  for (double& x : w) x /= acc;
  return w;
}

double sigmoid_delta(double x, double delta) { return logistic(6.0 * x / delta - 3.0); }

double sigmoid_delta_deriv(double x, double delta) { return (6.0 / delta) * logistic_deriv(6.0 * x / delta - 3.0); }

double power_sum_dbm(std::span<const double> powers_dbm) {
  // log-sum-exp on the natural-log scale of linear power.
  return smooth_max_dbm(powers_dbm, kNepersPerDb);
}

double user_utility(std::span<const double> powers_dbm, const UtilityConfig& cfg) {
  switch (cfg.family) {
    case UtilityFamily::UnicastRate:
      return rate_from_snr_db(smooth_max_dbm(powers_dbm, cfg.softmax_alpha) - cfg.noise_dbm);
    case UtilityFamily::BroadcastRate:
      return rate_from_snr_db(power_sum_dbm(powers_dbm) - cfg.noise_dbm);
    case UtilityFamily::ThresholdSigmoidUnicast:
      return sigmoid_delta(smooth_max_dbm(powers_dbm, cfg.softmax_alpha) - cfg.p_min_dbm, cfg.delta_db);
    case UtilityFamily::ThresholdSigmoidBroadcast:
      return sigmoid_delta(power_sum_dbm(powers_dbm) - cfg.p_min_dbm, cfg.delta_db);
  }
  throw InvalidArgument("unknown utility family");
}

std::vector<double> user_utility_partials(std::span<const double> powers_dbm, const UtilityConfig& cfg) {
  // f(p) = g(aggregate(p)); aggregate is a log-sum-exp whose gradient is a
  // soft-max. Broadcast aggregation is the exact linear power sum, i.e. a
  // log-sum-exp with temperature ln(10)/10.
  const bool unicast = cfg.family == UtilityFamily::UnicastRate ||
                       cfg.family == UtilityFamily::ThresholdSigmoidUnicast;
  const double alpha = unicast ? cfg.softmax_alpha : kNepersPerDb;
  const double aggregate = smooth_max_dbm(powers_dbm, alpha);

  double outer = 0.0;
  switch (cfg.family) {
    case UtilityFamily::UnicastRate:
    case UtilityFamily::BroadcastRate:
      outer = rate_slope_per_db(aggregate - cfg.noise_dbm);
      break;
    case UtilityFamily::ThresholdSigmoidUnicast:
    case UtilityFamily::ThresholdSigmoidBroadcast:
      outer = sigmoid_delta_deriv(aggregate - cfg.p_min_dbm, cfg.delta_db);
      break;
  }
  auto partials = softmax_weights(powers_dbm, alpha);
  for (double& w : partials) w *= outer;
  return partials;
}

double exact_user_utility(std::span<const double> powers_dbm, const UtilityConfig& cfg) {
  require_powers(powers_dbm);
  switch (cfg.family) {
    case UtilityFamily::UnicastRate:
      return rate_from_snr_db(max_of(powers_dbm) - cfg.noise_dbm);
    case UtilityFamily::BroadcastRate:
      return rate_from_snr_db(power_sum_dbm(powers_dbm) - cfg.noise_dbm);
    case UtilityFamily::ThresholdSigmoidUnicast:
      return max_of(powers_dbm) >= cfg.p_min_dbm ? 1.0 : 0.0;
    case UtilityFamily::ThresholdSigmoidBroadcast:
      return power_sum_dbm(powers_dbm) >= cfg.p_min_dbm ? 1.0 : 0.0;
  }
  throw InvalidArgument("unknown utility family");
}

std::vector<WeightedUser> uniform_users(std::span<const Position> locations) {
  std::vector<WeightedUser> users;
  users.reserve(locations.size());
  const double w = 1.0 / static_cast<double>(locations.size());
  for (const auto& x : locations) users.push_back({x, w});
  return users;
}

namespace {

void require_weights(std::span<const WeightedUser> users) {
  if (users.empty()) throw InvalidArgument("network utility needs at least one user");
  double total = 0.0;
  for (const auto& u : users) {
    if (!(u.weight >= 0.0)) throw InvalidArgument("user weights must be nonnegative");
    total += u.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InvalidArgument("user weights must sum to 1 (got " + std::to_string(total) + ")");
  }
}

template <typename PerUser>
double weighted_sum(std::span<const Placement> placements, std::span<const WeightedUser> users,
                    const ChannelModel& channel, PerUser&& per_user) {
  if (placements.empty()) throw InvalidArgument("network utility needs at least one AirBS");
  require_weights(users);
  double total = 0.0;
  for (const auto& user : users) {
    const auto powers = received_powers_dbm(placements, user.location, channel);
    total += user.weight * per_user(powers);
  }
  return total;
}

}  // namespace

double network_utility(std::span<const Placement> placements, std::span<const WeightedUser> users,
                       const UtilityConfig& cfg, const ChannelModel& channel) {
  return weighted_sum(placements, users, channel,
                      [&](const std::vector<double>& p) { return user_utility(p, cfg); });
}

double exact_network_utility(std::span<const Placement> placements, std::span<const WeightedUser> users,
                             const UtilityConfig& cfg, const ChannelModel& channel) {
  return weighted_sum(placements, users, channel,
                      [&](const std::vector<double>& p) { return exact_user_utility(p, cfg); });
}

std::vector<Vec3> network_utility_gradient(std::span<const Placement> placements,
                                           std::span<const WeightedUser> users, const UtilityConfig& cfg,
                                           const ChannelModel& channel, bool horizontal_only) {
  if (placements.empty()) throw InvalidArgument("network utility needs at least one AirBS");
  require_weights(users);
  std::vector<Vec3> grad(placements.size());
  for (const auto& user : users) {
    const auto powers = received_powers_dbm(placements, user.location, channel);
    const auto partials = user_utility_partials(powers, cfg);
    for (std::size_t b = 0; b < placements.size(); ++b) {
      const Vec3 dp = channel.power_gradient(placements[b].position, user.location, placements[b].params);
      grad[b] += dp * (user.weight * partials[b]);
    }
  }
  if (horizontal_only) {
    for (auto& g : grad) g.z = 0.0;
  }
  return grad;
}

}  // namespace airbs
