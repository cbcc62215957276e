#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "airbs/channel.hpp"
#include "airbs/geometry.hpp"

namespace airbs {

/// Waypoints of every agent at every iteration plus the full-information
/// utility trace. Snapshot 0 is the initial placement.
struct TrajectoryLog {
  std::vector<std::vector<Position>> snapshots;
  /// Surrogate network utility J(l) evaluated with full information.
  std::vector<double> oracle_utility;
  /// Non-surrogate counterpart (exact max, unit step).
  std::vector<double> exact_utility;

  std::size_t num_iterations() const { return snapshots.empty() ? 0 : snapshots.size() - 1; }
};

struct HistogramBin {
  double lo = 0.0;  // -inf for the underflow bin
  double hi = 0.0;  // +inf for the overflow bin
  std::size_t count = 0;
};

/// Fixed-width bins over [lo, hi) with one underflow and one overflow bin.
struct Histogram {
  double lo = -110.0;
  double hi = -70.0;
  double bin_width = 1.0;
  std::vector<HistogramBin> bins;

  std::size_t total() const;
};

Histogram power_histogram(std::span<const double> powers_dbm, double bin_width_db, double lo, double hi);

/// Strongest received power at each MU, exact max, dBm.
std::vector<double> max_power_per_mu(std::span<const Placement> placements, std::span<const Position> mus,
                                     const ChannelModel& channel);

/// MUs whose strongest received power is at least p_min.
std::size_t served_count(std::span<const Placement> placements, std::span<const Position> mus,
                         const ChannelModel& channel, double p_min_dbm);

struct HistogramSpec {
  double bin_width_db = 1.0;
  double lo_dbm = -110.0;
  double hi_dbm = -70.0;
  friend bool operator==(const HistogramSpec&, const HistogramSpec&) = default;
};

struct CoverageStats {
  std::size_t served_count = 0;
  std::size_t total_mus = 0;
  std::vector<double> per_mu_max_power_dbm;
  Histogram histogram;
};

CoverageStats coverage_stats(std::span<const Placement> placements, std::span<const Position> mus,
                             const ChannelModel& channel, double p_min_dbm, const HistogramSpec& spec);

struct MetricsReport {
  double p_min_dbm = 0.0;
  CoverageStats initial;
  CoverageStats final;
  double initial_oracle_utility = 0.0;
  double final_oracle_utility = 0.0;
  double final_exact_utility = 0.0;
  std::optional<CoverageStats> kmeans;
  std::vector<Position> kmeans_centroids;
};

/// Maximum received power on a regular grid, clipped to [clip_lo, clip_hi].
struct CoverageGrid {
  Rect area;
  std::size_t nx = 0;
  std::size_t ny = 0;
  double clip_lo = -100.0;
  double clip_hi = -80.0;
  std::vector<double> values;  // row-major, y outer

  double x_at(std::size_t ix) const;
  double y_at(std::size_t iy) const;
  double at(std::size_t ix, std::size_t iy) const { return values[iy * nx + ix]; }
};

/// Grid points include the area corners; the receiver sits at height `receiver_z`.
CoverageGrid coverage_map(std::span<const Placement> placements, const Rect& area, std::size_t nx, std::size_t ny,
                          const ChannelModel& channel, double clip_lo, double clip_hi, double receiver_z = 0.0);

/// Shortest round-trip decimal form; locale independent.
std::string format_number(double v);

std::string trajectory_csv(const TrajectoryLog& log);
std::string metrics_json(const MetricsReport& report);
std::string coverage_csv(const CoverageGrid& grid);
std::string map_svg(const TrajectoryLog& log, const CoverageGrid& grid, std::span<const Position> mus,
                    int smoothing_window = 1);
std::string histogram_svg(const Histogram& hist, const std::string& title, double p_min_dbm);

/// Writes trajectory.csv, metrics.json, coverage.csv, map.svg,
/// hist_initial.svg and hist_final.svg into `out_dir` (created if missing).
void render_outputs(const TrajectoryLog& log, const MetricsReport& report, const CoverageGrid& grid,
                    std::span<const Position> mus, const std::filesystem::path& out_dir, int smoothing_window = 1);

void write_text_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace airbs
