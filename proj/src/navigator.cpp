#include "airbs/navigator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "airbs/error.hpp"

namespace airbs {

std::string_view to_string(StepKind kind) {
  switch (kind) {
    case StepKind::Constant: return "constant";
    case StepKind::InverseTime: return "inverse_time";
    case StepKind::InverseSqrt: return "inverse_sqrt";
  }
  return "unknown";
}

StepKind step_kind_from_string(std::string_view name) {
  for (auto kind : {StepKind::Constant, StepKind::InverseTime, StepKind::InverseSqrt}) {
    if (to_string(kind) == name) return kind;
  }
  throw InvalidArgument("unknown step schedule '" + std::string(name) + "'");
}

double StepSchedule::eta_at(std::size_t i) const {
  const double t = static_cast<double>(i) / decay_iterations;
  switch (kind) {
    case StepKind::Constant: return eta;
    case StepKind::InverseTime: return eta / (1.0 + t);
    case StepKind::InverseSqrt: return eta / std::sqrt(1.0 + t);
  }
  return eta;
}

void StepSchedule::validate() const {
  // eta = 0 is accepted as a frozen-placement control run.
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw InvalidArgument("step size eta must be finite and >= 0");
  if (!(decay_iterations > 0.0)) throw InvalidArgument("decay_iterations must be positive");
  if (minibatch_size < 1) throw InvalidArgument("minibatch size must be >= 1");
  if (!(length_unit_m > 0.0) || !std::isfinite(length_unit_m)) {
    throw InvalidArgument("length_unit_m must be positive");
  }
}

AirBsAgent::AirBsAgent(std::size_t index, Position position, ChannelParams params,
                       std::optional<double> fixed_height)
    : index_(index), position_(position), params_(params), fixed_height_(fixed_height) {
  params_.validate();
  if (fixed_height_) position_.z = *fixed_height_;
  validate_position(position_);
}

Vec3 AirBsAgent::minibatch_mean() const {
  if (minibatch_count_ == 0) throw InvalidArgument("agent minibatch is empty");
  return minibatch_sum_ / static_cast<double>(minibatch_count_);
}

void AirBsAgent::accumulate(const Vec3& grad) {
  minibatch_sum_ += grad;
  ++minibatch_count_;
}

void AirBsAgent::apply_update(double eta) {
  Vec3 step = minibatch_mean() * eta;
  if (fixed_height_) step.z = 0.0;
  position_ += step;
  if (fixed_height_) position_.z = *fixed_height_;
  minibatch_sum_ = {};
  minibatch_count_ = 0;
}

void AirBsAgent::set_position(const Position& p) {
  position_ = p;
  if (fixed_height_) position_.z = *fixed_height_;
}

Vec3 agent_partial_gradient(const AirBsAgent& agent, const ControlPacket& packet, const UtilityConfig& cfg,
                            const ChannelModel& channel) {
  if (agent.index() >= packet.measured_powers_dbm.size()) {
    throw InvalidArgument("agent index " + std::to_string(agent.index()) + " not covered by a packet with " +
                          std::to_string(packet.measured_powers_dbm.size()) + " powers");
  }
  const double partial = user_utility_partials(packet.measured_powers_dbm, cfg)[agent.index()];
  const Vec3 channel_grad = channel.power_gradient(agent.position(), packet.mu_location, agent.channel_params());
  return channel_grad * partial;
}

std::vector<Position> smooth_waypoints(std::span<const Position> waypoints, int window) {
  if (window < 1 || window % 2 == 0) throw InvalidArgument("smoothing window must be odd and >= 1");
  const auto n = static_cast<std::ptrdiff_t>(waypoints.size());
  const std::ptrdiff_t half = window / 2;
  std::vector<Position> out;
  out.reserve(waypoints.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    // Shrink symmetrically near the ends so the average stays centered.
    const std::ptrdiff_t h = std::min({half, i, n - 1 - i});
    Vec3 acc;
    for (std::ptrdiff_t j = i - h; j <= i + h; ++j) acc += waypoints[static_cast<std::size_t>(j)];
    out.push_back(acc / static_cast<double>(2 * h + 1));
  }
  return out;
}

Position clamp_speed(const Position& prev, const Position& next, double max_move_m) {
  if (!(max_move_m > 0.0)) throw InvalidArgument("speed limit must be positive");
  const Vec3 move = next - prev;
  const double len = norm(move);
  if (len <= max_move_m) return next;
  double scale = max_move_m / len;
  Position out = prev + move * scale;
  // Rounding in prev + move * scale can overshoot by a few ulps of |prev|.
  double shrink = std::numeric_limits<double>::epsilon();
  for (int i = 0; i < 64 && distance(prev, out) > max_move_m; ++i) {
    scale *= 1.0 - shrink;
    shrink *= 2.0;
    out = prev + move * scale;
  }
  return distance(prev, out) > max_move_m ? prev : out;
}

}  // namespace airbs
