#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "airbs/baseline.hpp"
#include "airbs/channel.hpp"
#include "airbs/geometry.hpp"
#include "airbs/navigator.hpp"
#include "airbs/report.hpp"
#include "airbs/rng.hpp"
#include "airbs/traffic.hpp"
#include "airbs/utility.hpp"

namespace airbs {

struct ReportOptions {
  HistogramSpec histogram;
  std::size_t grid_nx = 71;
  std::size_t grid_ny = 71;
  double clip_lo_dbm = -100.0;
  double clip_hi_dbm = -80.0;
  /// Moving-average window applied to drawn trajectories; 1 draws raw waypoints.
  int smoothing_window = 1;
  friend bool operator==(const ReportOptions&, const ReportOptions&) = default;
};

/// Complete description of one experiment.
struct Scenario {
  std::string name = "scenario";
  Rect area{0.0, 0.0, 7000.0, 7000.0};
  Rect init_region{0.0, 0.0, 3500.0, 3500.0};
  /// One entry per AirBS; its length is the number of AirBSs.
  std::vector<double> tx_powers_dbm{7.0, 9.0, 9.0, 9.0, 12.0};
  double airbs_height_m = 30.0;
  bool fix_height = true;
  /// MUs placed uniformly at random over `area`.
  std::size_t num_mus = 200;
  /// Appended after the random MUs; may lie outside `area`.
  std::vector<Position> extra_mu_positions;
  /// Traffic share per MU (random first, then extra). Empty means uniform.
  std::vector<double> traffic_shares;
  UtilityConfig utility;
  StepSchedule schedule;
  std::size_t iterations = 100;
  std::uint64_t seed = 1;
  /// Shared link budget; tx_power_dbm is taken from tx_powers_dbm.
  ChannelParams channel;
  MeasurementNoise measurement_noise;
  /// Optional per-update displacement limit, meters.
  std::optional<double> max_move_m;
  bool compare_kmeans = false;
  std::size_t kmeans_max_iters = 300;
  ReportOptions report;

  std::size_t num_airbs() const { return tx_powers_dbm.size(); }
  std::size_t total_mus() const { return num_mus + extra_mu_positions.size(); }
  ChannelParams params_for(std::size_t b) const;
  /// Throws InvalidArgument describing the first violated constraint.
  void validate() const;
  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Mutable simulation state for one replication.
struct World {
  std::vector<AirBsAgent> agents;
  std::vector<Position> mus;
  TrafficProfile profile;
  Rng traffic_rng;
  Rng measurement_rng;
  std::size_t iteration = 0;

  std::vector<Placement> placements() const;
};

/// Agents uniform in init_region at the AirBS height, MUs uniform in the area
/// (ground level) followed by the extra MUs. All randomness comes from the seed.
World init_scenario(const Scenario& s);

/// One iteration: Q packets, each broadcast to every agent, then one
/// synchronous position update.
void step(World& world, const Scenario& s, const ChannelModel& channel);

struct RunResult {
  TrajectoryLog log;
  MetricsReport metrics;
  std::vector<Position> mus;
  CoverageGrid coverage;
};

RunResult run(const Scenario& s, const ChannelModel& channel = free_space_channel());

/// Runs `count` replications with seeds s.seed, s.seed + 1, ... on at most
/// `threads` worker threads. Results are returned in seed order and do not
/// depend on `threads`.
std::vector<RunResult> run_replications(const Scenario& s, std::size_t count, std::size_t threads);

/// Effective parallelism: AIRBS_SGD_THREADS if set, else hardware concurrency.
std::size_t default_thread_count();

}  // namespace airbs
