#include "airbs/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "airbs/error.hpp"
#include "airbs/navigator.hpp"

namespace airbs {

std::size_t Histogram::total() const {
  std::size_t n = 0;
  for (const auto& b : bins) n += b.count;
  return n;
}

Histogram power_histogram(std::span<const double> powers_dbm, double bin_width_db, double lo, double hi) {
  if (!(bin_width_db > 0.0)) throw InvalidArgument("histogram bin width must be positive");
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) throw InvalidArgument("histogram range must satisfy lo < hi");
  const auto inner = static_cast<std::size_t>(std::ceil((hi - lo) / bin_width_db - 1e-9));

  Histogram h{lo, lo + static_cast<double>(inner) * bin_width_db, bin_width_db, {}};
  constexpr double inf = std::numeric_limits<double>::infinity();
  h.bins.push_back({-inf, lo, 0});
  for (std::size_t k = 0; k < inner; ++k) {
    h.bins.push_back({lo + static_cast<double>(k) * bin_width_db, lo + static_cast<double>(k + 1) * bin_width_db, 0});
  }
  h.bins.push_back({h.hi, inf, 0});

  for (double p : powers_dbm) {
    if (p < lo) {
      ++h.bins.front().count;
    } else if (p >= h.hi) {
      ++h.bins.back().count;
    } else {
      auto k = static_cast<std::size_t>(std::floor((p - lo) / bin_width_db));
      k = std::min(k, inner - 1);
      ++h.bins[k + 1].count;
    }
  }
  return h;
}

std::vector<double> max_power_per_mu(std::span<const Placement> placements, std::span<const Position> mus,
                                     const ChannelModel& channel) {
  if (placements.empty()) throw InvalidArgument("coverage needs at least one AirBS");
  std::vector<double> out;
  out.reserve(mus.size());
  for (const auto& mu : mus) {
    const auto p = received_powers_dbm(placements, mu, channel);
    out.push_back(*std::max_element(p.begin(), p.end()));
  }
  return out;
}

std::size_t served_count(std::span<const Placement> placements, std::span<const Position> mus,
                         const ChannelModel& channel, double p_min_dbm) {
  const auto powers = max_power_per_mu(placements, mus, channel);
  return static_cast<std::size_t>(
      std::count_if(powers.begin(), powers.end(), [&](double p) { return p >= p_min_dbm; }));
}

CoverageStats coverage_stats(std::span<const Placement> placements, std::span<const Position> mus,
                             const ChannelModel& channel, double p_min_dbm, const HistogramSpec& spec) {
  CoverageStats s;
  s.per_mu_max_power_dbm = max_power_per_mu(placements, mus, channel);
  s.total_mus = mus.size();
  s.served_count = static_cast<std::size_t>(std::count_if(s.per_mu_max_power_dbm.begin(), s.per_mu_max_power_dbm.end(),
                                                          [&](double p) { return p >= p_min_dbm; }));
  s.histogram = power_histogram(s.per_mu_max_power_dbm, spec.bin_width_db, spec.lo_dbm, spec.hi_dbm);
  return s;
}

double CoverageGrid::x_at(std::size_t ix) const {
  return area.x_min + area.width() * static_cast<double>(ix) / static_cast<double>(nx - 1);
}

double CoverageGrid::y_at(std::size_t iy) const {
  return area.y_min + area.height() * static_cast<double>(iy) / static_cast<double>(ny - 1);
}

CoverageGrid coverage_map(std::span<const Placement> placements, const Rect& area, std::size_t nx, std::size_t ny,
                          const ChannelModel& channel, double clip_lo, double clip_hi, double receiver_z) {
  if (nx < 2 || ny < 2) throw InvalidArgument("coverage grid needs at least 2 points per axis");
  if (!(clip_hi > clip_lo)) throw InvalidArgument("coverage clip range must satisfy lo < hi");
  if (placements.empty()) throw InvalidArgument("coverage needs at least one AirBS");
  CoverageGrid grid{area, nx, ny, clip_lo, clip_hi, {}};
  grid.values.reserve(nx * ny);
  for (std::size_t iy = 0; iy < ny; ++iy) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const Position x{grid.x_at(ix), grid.y_at(iy), receiver_z};
      double best = -std::numeric_limits<double>::infinity();
      for (const auto& site : placements) {
        // Saturate at the singularity instead of throwing.
        const double p = distance(site.position, x) < kMinSeparationM
                             ? clip_hi
                             : channel.power_dbm(site.position, x, site.params);
        best = std::max(best, p);
      }
      grid.values.push_back(std::clamp(best, clip_lo, clip_hi));
    }
  }
  return grid;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

namespace {

std::string fixed2(double v) {
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, 2);
  return std::string(buf.data(), end);
}

nlohmann::json edge(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

nlohmann::json histogram_json(const Histogram& h) {
  nlohmann::json bins = nlohmann::json::array();
  for (const auto& b : h.bins) bins.push_back({{"lo", edge(b.lo)}, {"hi", edge(b.hi)}, {"count", b.count}});
  return {{"bin_width_db", h.bin_width}, {"lo_dbm", h.lo}, {"hi_dbm", h.hi}, {"bins", bins}};
}

nlohmann::json stats_json(const CoverageStats& s) {
  return {{"served_count", s.served_count},
          {"total_mus", s.total_mus},
          {"per_mu_max_power_dbm", s.per_mu_max_power_dbm},
          {"histogram", histogram_json(s.histogram)}};
}

// Piecewise-linear approximation of the viridis colour map.
std::string colour(double t) {
  static constexpr std::array<std::array<double, 3>, 5> stops{{
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
  t = std::clamp(t, 0.0, 1.0) * static_cast<double>(stops.size() - 1);
  const auto k = std::min(static_cast<std::size_t>(t), stops.size() - 2);
  const double f = t - static_cast<double>(k);
  std::ostringstream out;
  out << "rgb(";
  for (int c = 0; c < 3; ++c) {
    const double v = stops[k][c] + f * (stops[k + 1][c] - stops[k][c]);
    out << static_cast<int>(std::lround(v)) << (c < 2 ? "," : ")");
  }
  return out.str();
}

}  // namespace

std::string trajectory_csv(const TrajectoryLog& log) {
  std::ostringstream out;
  out << "iteration,agent,x,y,z,oracle_utility,exact_utility\n";
  for (std::size_t i = 0; i < log.snapshots.size(); ++i) {
    for (std::size_t b = 0; b < log.snapshots[i].size(); ++b) {
      const auto& p = log.snapshots[i][b];
      out << i << ',' << b << ',' << format_number(p.x) << ',' << format_number(p.y) << ',' << format_number(p.z)
          << ',' << format_number(log.oracle_utility.at(i)) << ',' << format_number(log.exact_utility.at(i)) << '\n';
    }
  }
  return out.str();
}

std::string metrics_json(const MetricsReport& report) {
  nlohmann::json j;
  j["p_min_dbm"] = report.p_min_dbm;
  j["total_mus"] = report.final.total_mus;
  j["served_count"] = report.final.served_count;
  j["initial_oracle_utility"] = report.initial_oracle_utility;
  j["final_oracle_utility"] = report.final_oracle_utility;
  j["final_exact_utility"] = report.final_exact_utility;
  j["initial"] = stats_json(report.initial);
  j["final"] = stats_json(report.final);
  if (report.kmeans) {
    nlohmann::json k = stats_json(*report.kmeans);
    nlohmann::json centroids = nlohmann::json::array();
    for (const auto& c : report.kmeans_centroids) centroids.push_back({c.x, c.y, c.z});
    k["centroids"] = centroids;
    j["kmeans"] = k;
  }
  return j.dump(2) + "\n";
}

std::string coverage_csv(const CoverageGrid& grid) {
  std::ostringstream out;
  out << "x,y,max_power_dbm\n";
  for (std::size_t iy = 0; iy < grid.ny; ++iy) {
    for (std::size_t ix = 0; ix < grid.nx; ++ix) {
      out << format_number(grid.x_at(ix)) << ',' << format_number(grid.y_at(iy)) << ','
          << format_number(grid.at(ix, iy)) << '\n';
    }
  }
  return out.str();
}

std::string map_svg(const TrajectoryLog& log, const CoverageGrid& grid, std::span<const Position> mus,
                    int smoothing_window) {
  constexpr double kSide = 600.0;
  constexpr double kMargin = 40.0;
  constexpr double kBar = 90.0;
  const Rect& a = grid.area;
  auto px = [&](double x) { return kMargin + (x - a.x_min) / a.width() * kSide; };
  auto py = [&](double y) { return kMargin + kSide - (y - a.y_min) / a.height() * kSide; };
  const double cw = kSide / static_cast<double>(grid.nx - 1);
  const double ch = kSide / static_cast<double>(grid.ny - 1);

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed2(kSide + 2 * kMargin + kBar) << "\" height=\""
      << fixed2(kSide + 2 * kMargin) << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n<g shape-rendering=\"crispEdges\">\n";
  for (std::size_t iy = 0; iy < grid.ny; ++iy) {
    for (std::size_t ix = 0; ix < grid.nx; ++ix) {
      const double x0 = std::max(px(grid.x_at(ix)) - cw / 2, kMargin);
      const double x1 = std::min(px(grid.x_at(ix)) + cw / 2, kMargin + kSide);
      const double y0 = std::max(py(grid.y_at(iy)) - ch / 2, kMargin);
      const double y1 = std::min(py(grid.y_at(iy)) + ch / 2, kMargin + kSide);
      const double t = (grid.at(ix, iy) - grid.clip_lo) / (grid.clip_hi - grid.clip_lo);
      out << "<rect x=\"" << fixed2(x0) << "\" y=\"" << fixed2(y0) << "\" width=\"" << fixed2(x1 - x0)
          << "\" height=\"" << fixed2(y1 - y0) << "\" fill=\"" << colour(t) << "\"/>\n";
    }
  }
  out << "</g>\n";

  for (const auto& m : mus) {
    if (!a.contains(m)) continue;
    out << "<circle class=\"mu\" cx=\"" << fixed2(px(m.x)) << "\" cy=\"" << fixed2(py(m.y))
        << "\" r=\"2.5\" fill=\"white\" stroke=\"black\" stroke-width=\"0.6\"/>\n";
  }

  const std::size_t num_agents = log.snapshots.empty() ? 0 : log.snapshots.front().size();
  for (std::size_t b = 0; b < num_agents; ++b) {
    std::vector<Position> path;
    path.reserve(log.snapshots.size());
    for (const auto& snap : log.snapshots) path.push_back(snap[b]);
    if (smoothing_window > 1) path = smooth_waypoints(path, smoothing_window);
    out << "<polyline class=\"trajectory\" fill=\"none\" stroke=\"limegreen\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < path.size(); ++i) {
      out << (i ? " " : "") << fixed2(px(path[i].x)) << ',' << fixed2(py(path[i].y));
    }
    out << "\"/>\n";
    const auto& last = log.snapshots.back()[b];
    out << "<rect class=\"airbs\" x=\"" << fixed2(px(last.x) - 5) << "\" y=\"" << fixed2(py(last.y) - 5)
        << "\" width=\"10\" height=\"10\" fill=\"none\" stroke=\"red\" stroke-width=\"2\"/>\n";
  }

  // Colour bar.
  const double bx = kMargin + kSide + 20;
  for (int k = 0; k < 50; ++k) {
    const double t = (k + 0.5) / 50.0;
    out << "<rect x=\"" << fixed2(bx) << "\" y=\"" << fixed2(kMargin + kSide * (1 - (k + 1) / 50.0))
        << "\" width=\"20\" height=\"" << fixed2(kSide / 50.0 + 0.5) << "\" fill=\"" << colour(t) << "\"/>\n";
  }
  out << "<text x=\"" << fixed2(bx + 24) << "\" y=\"" << fixed2(kMargin + 10) << "\" font-size=\"11\">"
      << format_number(grid.clip_hi) << " dBm</text>\n";
  out << "<text x=\"" << fixed2(bx + 24) << "\" y=\"" << fixed2(kMargin + kSide) << "\" font-size=\"11\">"
      << format_number(grid.clip_lo) << " dBm</text>\n";
  out << "<rect x=\"" << fixed2(kMargin) << "\" y=\"" << fixed2(kMargin) << "\" width=\"" << fixed2(kSide)
      << "\" height=\"" << fixed2(kSide) << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "</svg>\n";
  return out.str();
}

std::string histogram_svg(const Histogram& hist, const std::string& title, double p_min_dbm) {
  constexpr double kWidth = 640.0;
  constexpr double kHeight = 320.0;
  constexpr double kMargin = 40.0;
  const double plot_w = kWidth - 2 * kMargin;
  const double plot_h = kHeight - 2 * kMargin;
  std::size_t peak = 1;
  for (const auto& b : hist.bins) peak = std::max(peak, b.count);
  const double bar_w = plot_w / static_cast<double>(hist.bins.size());
  // Bin k spans [lo + (k-1) w, lo + k w); underflow and overflow take one slot each.
  auto px = [&](double dbm) { return kMargin + bar_w * (1.0 + (dbm - hist.lo) / hist.bin_width); };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed2(kWidth) << "\" height=\"" << fixed2(kHeight)
      << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << fixed2(kMargin) << "\" y=\"24\" font-size=\"13\">" << title << "</text>\n";
  for (std::size_t k = 0; k < hist.bins.size(); ++k) {
    const double h = plot_h * static_cast<double>(hist.bins[k].count) / static_cast<double>(peak);
    const bool edge_bin = k == 0 || k + 1 == hist.bins.size();
    out << "<rect class=\"bin\" x=\"" << fixed2(kMargin + bar_w * static_cast<double>(k)) << "\" y=\""
        << fixed2(kMargin + plot_h - h) << "\" width=\"" << fixed2(bar_w * 0.9) << "\" height=\"" << fixed2(h)
        << "\" fill=\"" << (edge_bin ? "gray" : "steelblue") << "\"/>\n";
  }
  if (p_min_dbm >= hist.lo && p_min_dbm <= hist.hi) {
    out << "<line x1=\"" << fixed2(px(p_min_dbm)) << "\" y1=\"" << fixed2(kMargin) << "\" x2=\""
        << fixed2(px(p_min_dbm)) << "\" y2=\"" << fixed2(kMargin + plot_h)
        << "\" stroke=\"red\" stroke-dasharray=\"4 3\"/>\n";
  }
  out << "<line x1=\"" << fixed2(kMargin) << "\" y1=\"" << fixed2(kMargin + plot_h) << "\" x2=\""
      << fixed2(kMargin + plot_w) << "\" y2=\"" << fixed2(kMargin + plot_h) << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << fixed2(px(hist.lo)) << "\" y=\"" << fixed2(kHeight - 12) << "\" font-size=\"11\">"
      << format_number(hist.lo) << "</text>\n";
  out << "<text x=\"" << fixed2(px(hist.hi) - 20) << "\" y=\"" << fixed2(kHeight - 12) << "\" font-size=\"11\">"
      << format_number(hist.hi) << " dBm</text>\n";
  out << "<text x=\"4\" y=\"" << fixed2(kMargin + 10) << "\" font-size=\"11\">" << peak << "</text>\n";
  out << "</svg>\n";
  return out.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f << contents;
  if (!f) throw IoError("failed writing '" + path.string() + "'");
}

void render_outputs(const TrajectoryLog& log, const MetricsReport& report, const CoverageGrid& grid,
                    std::span<const Position> mus, const std::filesystem::path& out_dir, int smoothing_window) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + out_dir.string() + "': " + ec.message());
  write_text_file(out_dir / "trajectory.csv", trajectory_csv(log));
  write_text_file(out_dir / "metrics.json", metrics_json(report));
  write_text_file(out_dir / "coverage.csv", coverage_csv(grid));
  write_text_file(out_dir / "map.svg", map_svg(log, grid, mus, smoothing_window));
  write_text_file(out_dir / "hist_initial.svg",
                  histogram_svg(report.initial.histogram, "Strongest AirBS power per MU, initial placement",
                                report.p_min_dbm));
  write_text_file(out_dir / "hist_final.svg",
                  histogram_svg(report.final.histogram, "Strongest AirBS power per MU, final placement",
                                report.p_min_dbm));
}

}  // namespace airbs
