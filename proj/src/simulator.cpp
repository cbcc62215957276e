#include "airbs/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "airbs/error.hpp"

namespace airbs {

namespace {

void require_rect(const Rect& r, const char* what, bool allow_degenerate) {
  const bool finite = std::isfinite(r.x_min) && std::isfinite(r.x_max) && std::isfinite(r.y_min) &&
                      std::isfinite(r.y_max);
  const bool ordered = allow_degenerate ? (r.x_max >= r.x_min && r.y_max >= r.y_min)
                                        : (r.x_max > r.x_min && r.y_max > r.y_min);
  if (!finite || !ordered) throw InvalidArgument(std::string(what) + " rectangle is malformed");
}

Position uniform_in(const Rect& r, double z, Rng& rng) {
  const double x = rng.uniform(r.x_min, r.x_max);
  const double y = rng.uniform(r.y_min, r.y_max);
  return {x, y, z};
}

TrafficProfile make_profile(const Scenario& s) {
  if (s.traffic_shares.empty()) return TrafficProfile::uniform(s.total_mus());
  return TrafficProfile(s.traffic_shares);
}

struct UtilityPair {
  double oracle;
  double exact;
};

UtilityPair evaluate(const World& world, const Scenario& s, const ChannelModel& channel) {
  const auto placements = world.placements();
  const auto users = world.profile.weighted_users(world.mus);
  return {network_utility(placements, users, s.utility, channel),
          exact_network_utility(placements, users, s.utility, channel)};
}

}  // namespace

ChannelParams Scenario::params_for(std::size_t b) const {
  ChannelParams p = channel;
  p.tx_power_dbm = tx_powers_dbm.at(b);
  return p;
}

void Scenario::validate() const {
  if (tx_powers_dbm.empty()) throw InvalidArgument("scenario needs at least one AirBS");
  if (total_mus() == 0) throw InvalidArgument("scenario needs at least one MU");
  require_rect(area, "area", false);
  require_rect(init_region, "init_region", true);
  if (!(airbs_height_m >= 0.0) || !std::isfinite(airbs_height_m)) {
    throw InvalidArgument("AirBS height must be finite and >= 0");
  }
  for (std::size_t b = 0; b < tx_powers_dbm.size(); ++b) params_for(b).validate();
  for (const auto& p : extra_mu_positions) validate_position(p);
  if (!traffic_shares.empty()) {
    if (traffic_shares.size() != total_mus()) {
      throw InvalidArgument("traffic_shares has " + std::to_string(traffic_shares.size()) + " entries for " +
                            std::to_string(total_mus()) + " MUs");
    }
    TrafficProfile{traffic_shares};
  }
  utility.validate();
  schedule.validate();
  if (!(measurement_noise.sigma_db >= 0.0)) throw InvalidArgument("measurement noise sigma must be >= 0");
  if (max_move_m && !(*max_move_m > 0.0)) throw InvalidArgument("max_move_m must be positive");
  if (compare_kmeans && total_mus() < num_airbs()) {
    throw InvalidArgument("k-means comparison needs at least as many MUs as AirBSs");
  }
  if (report.grid_nx < 2 || report.grid_ny < 2) throw InvalidArgument("coverage grid needs >= 2 points per axis");
  if (!(report.clip_hi_dbm > report.clip_lo_dbm)) throw InvalidArgument("coverage clip range must satisfy lo < hi");
  if (!(report.histogram.bin_width_db > 0.0) || !(report.histogram.hi_dbm > report.histogram.lo_dbm)) {
    throw InvalidArgument("histogram spec is malformed");
  }
  if (report.smoothing_window < 1 || report.smoothing_window % 2 == 0) {
    throw InvalidArgument("smoothing window must be odd and >= 1");
  }
}

std::vector<Placement> World::placements() const {
  std::vector<Placement> out;
  out.reserve(agents.size());
  for (const auto& a : agents) out.push_back(a.placement());
  return out;
}

World init_scenario(const Scenario& s) {
  s.validate();
  Rng placement_rng(s.seed, Stream::Placement);
  Rng users_rng(s.seed, Stream::Users);

  std::vector<AirBsAgent> agents;
  agents.reserve(s.num_airbs());
  const std::optional<double> pinned = s.fix_height ? std::optional<double>(s.airbs_height_m) : std::nullopt;
  for (std::size_t b = 0; b < s.num_airbs(); ++b) {
    agents.emplace_back(b, uniform_in(s.init_region, s.airbs_height_m, placement_rng), s.params_for(b), pinned);
  }

  std::vector<Position> mus;
  mus.reserve(s.total_mus());
  for (std::size_t m = 0; m < s.num_mus; ++m) mus.push_back(uniform_in(s.area, 0.0, users_rng));
  mus.insert(mus.end(), s.extra_mu_positions.begin(), s.extra_mu_positions.end());

  return World{std::move(agents), std::move(mus), make_profile(s), Rng(s.seed, Stream::Traffic),
               Rng(s.seed, Stream::Measurement), 0};
}

void step(World& world, const Scenario& s, const ChannelModel& channel) {
  // Packets are generated against the placement at the start of the iteration.
  const auto placements = world.placements();
  for (std::size_t q = 0; q < s.schedule.minibatch_size; ++q) {
    const std::size_t m = world.profile.sample_recipient(world.traffic_rng);
    const ControlPacket packet =
        make_control_packet(m, world.mus, placements, channel, s.measurement_noise, world.measurement_rng);
    for (auto& agent : world.agents) agent.accumulate(agent_partial_gradient(agent, packet, s.utility, channel));
  }
  const double eta = s.schedule.metric_step_at(world.iteration);
  for (auto& agent : world.agents) {
    const Position before = agent.position();
    agent.apply_update(eta);
    if (s.max_move_m) agent.set_position(clamp_speed(before, agent.position(), *s.max_move_m));
  }
  ++world.iteration;
}

RunResult run(const Scenario& s, const ChannelModel& channel) {
  World world = init_scenario(s);
  RunResult result;
  auto& log = result.log;
  auto record = [&] {
    std::vector<Position> snap;
    snap.reserve(world.agents.size());
    for (const auto& a : world.agents) snap.push_back(a.position());
    log.snapshots.push_back(std::move(snap));
    const auto u = evaluate(world, s, channel);
    log.oracle_utility.push_back(u.oracle);
    log.exact_utility.push_back(u.exact);
  };

  record();
  const auto initial = world.placements();
  for (std::size_t i = 0; i < s.iterations; ++i) {
    step(world, s, channel);
    record();
  }
  const auto final_placements = world.placements();

  auto& metrics = result.metrics;
  metrics.p_min_dbm = s.utility.p_min_dbm;
  metrics.initial = coverage_stats(initial, world.mus, channel, s.utility.p_min_dbm, s.report.histogram);
  metrics.final = coverage_stats(final_placements, world.mus, channel, s.utility.p_min_dbm, s.report.histogram);
  metrics.initial_oracle_utility = log.oracle_utility.front();
  metrics.final_oracle_utility = log.oracle_utility.back();
  metrics.final_exact_utility = log.exact_utility.back();

  if (s.compare_kmeans) {
    const auto km = kmeans_placement(world.mus, s.num_airbs(), s.kmeans_max_iters,
                                     derive_seed(s.seed, static_cast<std::uint64_t>(Stream::KMeans)),
                                     s.airbs_height_m);
    std::vector<Placement> km_sites;
    for (std::size_t b = 0; b < km.centroids.size(); ++b) km_sites.push_back({km.centroids[b], s.params_for(b)});
    metrics.kmeans = coverage_stats(km_sites, world.mus, channel, s.utility.p_min_dbm, s.report.histogram);
    metrics.kmeans_centroids = km.centroids;
  }

  result.coverage = coverage_map(final_placements, s.area, s.report.grid_nx, s.report.grid_ny, channel,
                                 s.report.clip_lo_dbm, s.report.clip_hi_dbm);
  result.mus = std::move(world.mus);
  return result;
}

std::vector<RunResult> run_replications(const Scenario& s, std::size_t count, std::size_t threads) {
  if (count == 0) throw InvalidArgument("replication count must be >= 1");
  s.validate();
  std::vector<RunResult> results(count);
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, count);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t r = next++; r < count; r = next++) {
      try {
        Scenario rep = s;
        rep.seed = s.seed + r;
        results[r] = run(rep);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

std::size_t default_thread_count() {
  std::size_t n = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("AIRBS_SGD_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) n = static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      // Unparseable values fall back to the hardware count.
    }
  }
  return n;
}

}  // namespace airbs
