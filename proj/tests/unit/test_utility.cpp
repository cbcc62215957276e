#include <doctest.h>

#include <cmath>
#include <numeric>

#include "airbs/error.hpp"
#include "airbs/rng.hpp"
#include "airbs/utility.hpp"
#include "oracles.hpp"

using namespace airbs;

namespace {

constexpr UtilityFamily kFamilies[] = {UtilityFamily::UnicastRate, UtilityFamily::BroadcastRate,
                                       UtilityFamily::ThresholdSigmoidUnicast,
                                       UtilityFamily::ThresholdSigmoidBroadcast};

UtilityConfig config(UtilityFamily f) {
  UtilityConfig c;
  c.family = f;
  return c;
}

bool is_broadcast(UtilityFamily f) {
  return f == UtilityFamily::BroadcastRate || f == UtilityFamily::ThresholdSigmoidBroadcast;
}

std::vector<double> random_powers(Rng& rng, std::size_t b, double centre, double spread) {
  std::vector<double> p(b);
  for (double& x : p) x = centre + rng.uniform(-spread, spread);
  return p;
}

}  // namespace

TEST_CASE("smooth max examples and bound") {
  const double eq[] = {-90, -90};
  CHECK(smooth_max_dbm(eq, 1.0) == doctest::Approx(-89.30685281944005).epsilon(1e-14));
  const double apart[] = {-80, -120};
  CHECK(std::abs(smooth_max_dbm(apart, 1.0) - (-80.0 + std::log1p(std::exp(-40.0)))) < 1e-10);
  const double close[] = {-85, -85.5};
  CHECK(smooth_max_dbm(close, 100.0) - (-85.0) < 0.007);

  Rng rng(1);
  for (int i = 0; i < 2000; ++i) {
    const auto b = 1 + rng.index(8);
    const auto p = random_powers(rng, b, -90, 30);
    const double alpha = std::pow(10.0, rng.uniform(-2, 2));
    const double top = *std::max_element(p.begin(), p.end());
    const double phi = smooth_max_dbm(p, alpha);
    CHECK(phi >= top);
    CHECK(phi <= top + std::log(static_cast<double>(b)) / alpha + 1e-12);
  }
  CHECK_THROWS_AS(smooth_max_dbm(eq, 0.0), InvalidArgument);
  CHECK_THROWS_AS(smooth_max_dbm(std::span<const double>{}, 1.0), InvalidArgument);
}

TEST_CASE("soft-max weights") {
  const std::vector<double> eq(5, -70.0);
  for (double w : softmax_weights(eq, 1.0)) CHECK(w == doctest::Approx(0.2).epsilon(1e-15));

  const double apart[] = {-80, -120};
  const auto w = softmax_weights(apart, 1.0);
  CHECK(w[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(w[1] == doctest::Approx(std::exp(-40.0)).epsilon(1e-12));

  Rng rng(2);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const auto p = random_powers(rng, 1 + rng.index(6), -90, 5);
    const double alpha = rng.uniform(0.2, 3);
    const auto weights = softmax_weights(p, alpha);
    CHECK(std::accumulate(weights.begin(), weights.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    for (double x : weights) CHECK(x > 0.0);
    const auto fd = testing::fd_gradient([&](std::span<const double> q) { return smooth_max_dbm(q, alpha); }, p, 1e-5);
    worst = std::max(worst, testing::relative_error(weights, fd));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("modified sigmoid") {
  for (double delta : {0.5, 1.0, 2.0, 7.0}) {
    CHECK(std::abs(sigmoid_delta(delta / 2, delta) - 0.5) < 1e-12);
    CHECK(sigmoid_delta(0.0, delta) == doctest::Approx(0.0474258731775668).epsilon(1e-13));
    CHECK(sigmoid_delta_deriv(delta / 2, delta) == doctest::Approx(1.5 / delta).epsilon(1e-14));
    CHECK(sigmoid_delta(0.0, delta) + sigmoid_delta(delta, delta) == doctest::Approx(1.0).epsilon(1e-15));
  }
  double prev = -1.0;
  for (double x = -60; x <= 60; x += 0.01) {
    const double s = sigmoid_delta(x, 2.0);
    CHECK(s >= prev);
    CHECK(sigmoid_delta_deriv(x, 2.0) > 0.0);
    prev = s;
  }
  for (double x : {-3.0, -0.4, 0.3, 1.0, 2.5, 5.0}) {
    const double fd = testing::central_difference([](double t) { return sigmoid_delta(t, 2.0); }, x, 1e-3);
    CHECK(testing::relative_error(sigmoid_delta_deriv(x, 2.0), fd) < 1e-7);
  }
}

TEST_CASE("user utility examples") {
  UtilityConfig cfg = config(UtilityFamily::UnicastRate);
  const double at_noise[] = {cfg.noise_dbm};
  CHECK(user_utility(at_noise, cfg) == doctest::Approx(1.0).epsilon(1e-14));

  cfg = config(UtilityFamily::ThresholdSigmoidUnicast);
  const double mid[] = {cfg.p_min_dbm + cfg.delta_db / 2};
  CHECK(user_utility(mid, cfg) == doctest::Approx(0.5).epsilon(1e-14));

  cfg = config(UtilityFamily::BroadcastRate);
  const double pair[] = {-100, -100};
  const double single[] = {-100 + 3.0102999566398120};
  CHECK(user_utility(pair, cfg) == doctest::Approx(user_utility(single, cfg)).epsilon(1e-14));

  cfg = config(UtilityFamily::ThresholdSigmoidBroadcast);
  const double thr_pair[] = {-93, -93};
  const double thr_single[] = {-93 + 3.0102999566398120};
  CHECK(user_utility(thr_pair, cfg) == doctest::Approx(user_utility(thr_single, cfg)).epsilon(1e-13));
}

TEST_CASE("user utility partials match finite differences for every family") {
  Rng rng(4);
  for (auto family : kFamilies) {
    CAPTURE(to_string(family));
    const UtilityConfig cfg = config(family);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      auto p = random_powers(rng, 1 + rng.index(6), cfg.p_min_dbm, 6);
      // Shift so the aggregate sits where the outer derivative is not negligible.
      const double agg = is_broadcast(family) ? power_sum_dbm(p) : smooth_max_dbm(p, cfg.softmax_alpha);
      const double shift = cfg.p_min_dbm + rng.uniform(-2, 4) - agg;
      for (double& x : p) x += shift;
      const auto partials = user_utility_partials(p, cfg);
      for (double d : partials) CHECK(d > 0.0);
      const auto fd = testing::fd_gradient([&](std::span<const double> q) { return user_utility(q, cfg); }, p, 1e-4);
      worst = std::max(worst, testing::relative_error(partials, fd));
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("utilities are nondecreasing in each power") {
  Rng rng(6);
  for (auto family : kFamilies) {
    const UtilityConfig cfg = config(family);
    for (int i = 0; i < 200; ++i) {
      auto p = random_powers(rng, 1 + rng.index(5), -95, 20);
      const double before = user_utility(p, cfg);
      p[rng.index(p.size())] += rng.uniform(0, 3);
      CHECK(user_utility(p, cfg) >= before);
    }
  }
}

TEST_CASE("symmetric powers give symmetric partials") {
  const std::vector<double> p(5, -90.0);
  const auto partials = user_utility_partials(p, config(UtilityFamily::ThresholdSigmoidUnicast));
  for (double d : partials) CHECK(d == partials.front());
}

TEST_CASE("exact utility uses the hard max and unit step") {
  UtilityConfig cfg = config(UtilityFamily::ThresholdSigmoidUnicast);
  const double served[] = {-91.0, -120.0};
  const double unserved[] = {-91.5, -91.5};
  CHECK(exact_user_utility(served, cfg) == 1.0);
  CHECK(exact_user_utility(unserved, cfg) == 0.0);
  cfg.family = UtilityFamily::ThresholdSigmoidBroadcast;
  CHECK(exact_user_utility(unserved, cfg) == 1.0);  // -91.5 + 3 dB
  cfg.family = UtilityFamily::UnicastRate;
  const double at_noise[] = {cfg.noise_dbm, cfg.noise_dbm};
  CHECK(exact_user_utility(at_noise, cfg) == doctest::Approx(1.0));
}

TEST_CASE("config validation and family names") {
  UtilityConfig cfg;
  cfg.delta_db = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.softmax_alpha = -1.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  for (auto f : kFamilies) CHECK(utility_family_from_string(to_string(f)) == f);
  CHECK_THROWS_AS(utility_family_from_string("sum_rate"), InvalidArgument);
}

namespace {

struct NetworkFixture {
  std::vector<Placement> sites;
  std::vector<WeightedUser> users;
};

NetworkFixture random_network(Rng& rng, std::size_t b, std::size_t m, bool uniform) {
  NetworkFixture f;
  for (std::size_t i = 0; i < b; ++i) {
    f.sites.push_back({{rng.uniform(0, 3000), rng.uniform(0, 3000), 30}, {-94, 1000, rng.uniform(5, 12)}});
  }
  std::vector<double> w(m);
  for (double& x : w) x = uniform ? 1.0 : rng.uniform(0.1, 1);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    f.users.push_back({{rng.uniform(0, 3000), rng.uniform(0, 3000), 0}, uniform ? 1.0 / m : w[i] / total});
  }
  return f;
}

}  // namespace

TEST_CASE("network utility reductions") {
  Rng rng(8);
  const UtilityConfig cfg;
  auto f = random_network(rng, 4, 30, true);

  double mean = 0.0;
  for (const auto& u : f.users) mean += user_utility(received_powers_dbm(f.sites, u.location, free_space_channel()), cfg);
  mean /= static_cast<double>(f.users.size());
  CHECK(network_utility(f.sites, f.users, cfg, free_space_channel()) == doctest::Approx(mean).epsilon(1e-14));

  const WeightedUser one[] = {{f.users[3].location, 1.0}};
  CHECK(network_utility(f.sites, one, cfg, free_space_channel()) ==
        user_utility(received_powers_dbm(f.sites, one[0].location, free_space_channel()), cfg));

  auto bad = f.users;
  bad[0].weight += 0.1;
  CHECK_THROWS_AS(network_utility(f.sites, bad, cfg, free_space_channel()), InvalidArgument);
  bad = f.users;
  bad[0].weight = -bad[0].weight;
  CHECK_THROWS_AS(network_utility(f.sites, bad, cfg, free_space_channel()), InvalidArgument);
}

TEST_CASE("network utility is invariant to swapping identical AirBSs") {
  Rng rng(10);
  for (auto family : kFamilies) {
    const UtilityConfig cfg = config(family);
    auto f = random_network(rng, 3, 40, false);
    f.sites[2].params = f.sites[0].params;
    auto swapped = f.sites;
    std::swap(swapped[0], swapped[2]);
    const double a = network_utility(f.sites, f.users, cfg, free_space_channel());
    const double b = network_utility(swapped, f.users, cfg, free_space_channel());
    CHECK(a == doctest::Approx(b).epsilon(1e-14));
    const auto ga = network_utility_gradient(f.sites, f.users, cfg, free_space_channel());
    const auto gb = network_utility_gradient(swapped, f.users, cfg, free_space_channel());
    CHECK(testing::relative_error(ga[0], gb[2]) < 1e-13);
    CHECK(testing::relative_error(ga[2], gb[0]) < 1e-13);
  }
}

TEST_CASE("network utility gradient matches finite differences") {
  Rng rng(12);
  for (auto family : kFamilies) {
    CAPTURE(to_string(family));
    UtilityConfig cfg = config(family);
    // Lower threshold so most users sit in the sigmoid's transition band.
    cfg.p_min_dbm = -80;
    cfg.delta_db = 8;
    double worst = 0.0;
    for (int i = 0; i < 25; ++i) {
      auto f = random_network(rng, 1 + rng.index(4), 20, false);
      const auto grad = network_utility_gradient(f.sites, f.users, cfg, free_space_channel());
      std::vector<double> flat_pos;
      for (const auto& s : f.sites) {
        flat_pos.insert(flat_pos.end(), {s.position.x, s.position.y, s.position.z});
      }
      auto objective = [&](std::span<const double> x) {
        auto moved = f.sites;
        for (std::size_t b = 0; b < moved.size(); ++b) moved[b].position = {x[3 * b], x[3 * b + 1], x[3 * b + 2]};
        return network_utility(moved, f.users, cfg, free_space_channel());
      };
      const auto fd = testing::fd_gradient(objective, flat_pos, 1e-2);
      worst = std::max(worst, testing::relative_error(testing::flatten(grad), fd));
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("network gradient geometry") {
  // B = 1, M = 1: horizontal components point at the MU.
  const Placement site[] = {{{1000, 500, 30}, {-94, 1000, 9}}};
  const WeightedUser user[] = {{{200, 100, 0}, 1.0}};
  const UtilityConfig cfg;
  const auto g = network_utility_gradient(site, user, cfg, free_space_channel());
  const Vec3 to_mu = user[0].location - site[0].position;
  CHECK(g[0].x * to_mu.y == doctest::Approx(g[0].y * to_mu.x));
  CHECK(g[0].x * to_mu.x > 0.0);
  CHECK(g[0].z < 0.0);
  const auto projected = network_utility_gradient(site, user, cfg, free_space_channel(), true);
  CHECK(projected[0].z == 0.0);
  CHECK(projected[0].x == g[0].x);
}
