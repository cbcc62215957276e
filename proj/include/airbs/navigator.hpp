#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "airbs/channel.hpp"
#include "airbs/geometry.hpp"
#include "airbs/traffic.hpp"
#include "airbs/utility.hpp"

namespace airbs {

enum class StepKind {
  Constant,     // eta
  InverseTime,  // eta / (1 + i / decay_iterations)
  InverseSqrt,  // eta / sqrt(1 + i / decay_iterations)
};

std::string_view to_string(StepKind kind);
StepKind step_kind_from_string(std::string_view name);

/// Step sizes and minibatching for the stochastic ascent.
///
/// The ascent runs in coordinates whose unit is `length_unit_m` meters, so a
/// step eta moves an agent by eta * length_unit_m^2 * (gradient in 1/m) meters.
struct StepSchedule {
  StepKind kind = StepKind::Constant;
  double eta = 5.0;
  double decay_iterations = 1.0;
  std::size_t minibatch_size = 50;
  double length_unit_m = 1.0;

  /// Step size at iteration i, in optimizer units.
  double eta_at(std::size_t i) const;
  /// The same step expressed for meter-valued gradients.
  double metric_step_at(std::size_t i) const { return eta_at(i) * length_unit_m * length_unit_m; }
  void validate() const;
  friend bool operator==(const StepSchedule&, const StepSchedule&) = default;
};

/// One AirBS's private state. An agent never sees other agents.
class AirBsAgent {
 public:
  AirBsAgent(std::size_t index, Position position, ChannelParams params,
             std::optional<double> fixed_height = std::nullopt);

  std::size_t index() const { return index_; }
  const Position& position() const { return position_; }
  const ChannelParams& channel_params() const { return params_; }
  std::optional<double> fixed_height() const { return fixed_height_; }
  Placement placement() const { return {position_, params_}; }

  const Vec3& minibatch_sum() const { return minibatch_sum_; }
  std::size_t minibatch_count() const { return minibatch_count_; }
  /// Throws InvalidArgument when the minibatch is empty.
  Vec3 minibatch_mean() const;

  void accumulate(const Vec3& grad);

  /// position += eta * minibatch mean, then resets the accumulator. With a
  /// fixed height the vertical component is discarded and z stays pinned.
  /// Throws InvalidArgument when the minibatch is empty.
  void apply_update(double eta);

  /// Moves the agent without touching the accumulator (e.g. speed clamping).
  void set_position(const Position& p);

 private:
  std::size_t index_;
  Position position_;
  ChannelParams params_;
  std::optional<double> fixed_height_;
  Vec3 minibatch_sum_;
  std::size_t minibatch_count_ = 0;
};

/// Per-packet ascent direction for one agent: the agent-side channel gradient
/// times the packet-side partial of the user utility for this agent's power.
Vec3 agent_partial_gradient(const AirBsAgent& agent, const ControlPacket& packet, const UtilityConfig& cfg,
                            const ChannelModel& channel);

/// Centered moving average per coordinate; windows shrink at the endpoints.
/// `window` must be odd and >= 1.
std::vector<Position> smooth_waypoints(std::span<const Position> waypoints, int window);

/// Limits the move prev -> next to at most `max_move_m` meters.
Position clamp_speed(const Position& prev, const Position& next, double max_move_m);

}  // namespace airbs
