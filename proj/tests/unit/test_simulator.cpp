#include <doctest.h>

#include <cmath>

#include "airbs/error.hpp"
#include "airbs/scenario_io.hpp"
#include "airbs/simulator.hpp"

using namespace airbs;

namespace {

Scenario small_reference(std::size_t iterations) {
  Scenario s = reference_scenario();
  s.iterations = iterations;
  s.compare_kmeans = false;
  s.report.grid_nx = s.report.grid_ny = 11;
  return s;
}

}  // namespace

TEST_CASE("reference initial placement") {
  const Scenario s = reference_scenario();
  const World w = init_scenario(s);
  REQUIRE(w.agents.size() == 5);
  for (const auto& a : w.agents) {
    CHECK(s.init_region.contains(a.position()));
    CHECK(a.position().x >= 0.0);
    CHECK(a.position().x <= 3500.0);
    CHECK(a.position().z == 30.0);
  }
  REQUIRE(w.mus.size() == 202);
  for (std::size_t m = 0; m < 200; ++m) {
    CHECK(s.area.contains(w.mus[m]));
    CHECK(w.mus[m].z == 0.0);
  }
  CHECK(w.mus[200] == Position{35000, 35000, 0});
  CHECK(w.mus[201] == Position{-35000, 35000, 0});
  CHECK(w.agents[4].channel_params().tx_power_dbm == 12.0);
}

TEST_CASE("zero-width initial region puts every agent at the same point") {
  Scenario s = small_reference(0);
  s.init_region = {1200, 800, 1200, 800};
  for (const auto& a : init_scenario(s).agents) CHECK(a.position() == Position{1200, 800, 30});
}

TEST_CASE("zero iterations leaves the placement untouched") {
  const auto r = run(small_reference(0));
  CHECK(r.log.num_iterations() == 0);
  REQUIRE(r.log.snapshots.size() == 1);
  CHECK(r.metrics.final.served_count == r.metrics.initial.served_count);
  CHECK(r.metrics.final_oracle_utility == r.metrics.initial_oracle_utility);
}

TEST_CASE("zero step size keeps agents still") {
  Scenario s = small_reference(20);
  s.schedule.eta = 0.0;
  const auto r = run(s);
  for (const auto& snap : r.log.snapshots) CHECK(snap == r.log.snapshots.front());
  CHECK(r.metrics.final.served_count == r.metrics.initial.served_count);
}

TEST_CASE("runs are deterministic in the seed") {
  const Scenario s = small_reference(15);
  const auto a = run(s);
  const auto b = run(s);
  CHECK(a.log.snapshots == b.log.snapshots);
  CHECK(a.log.oracle_utility == b.log.oracle_utility);
  CHECK(a.mus == b.mus);

  Scenario other = s;
  other.seed = s.seed + 1;
  CHECK(run(other).log.snapshots != a.log.snapshots);
}

TEST_CASE("log shape and pinned height") {
  const Scenario s = small_reference(12);
  const auto r = run(s);
  CHECK(r.log.snapshots.size() == 13);
  CHECK(r.log.oracle_utility.size() == 13);
  CHECK(r.log.exact_utility.size() == 13);
  for (const auto& snap : r.log.snapshots) {
    REQUIRE(snap.size() == 5);
    for (const auto& p : snap) CHECK(p.z == 30.0);
  }
}

TEST_CASE("speed limit bounds every move") {
  Scenario s = small_reference(30);
  s.max_move_m = 25.0;
  const auto r = run(s);
  for (std::size_t i = 1; i < r.log.snapshots.size(); ++i) {
    for (std::size_t b = 0; b < 5; ++b) CHECK(distance(r.log.snapshots[i - 1][b], r.log.snapshots[i][b]) <= 25.0);
  }
}

TEST_CASE("single user is reached") {
  Scenario s = load_scenario(AIRBS_SCENARIO_DIR "/single_user.json");
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    s.seed = seed;
    const auto r = run(s);
    CAPTURE(seed);
    CHECK(horizontal_distance(r.log.snapshots.back()[0], r.mus[0]) < 10.0);
  }
}

TEST_CASE("replications do not depend on the thread count") {
  const Scenario s = small_reference(10);
  const auto serial = run_replications(s, 4, 1);
  const auto parallel = run_replications(s, 4, 3);
  REQUIRE(serial.size() == 4);
  for (std::size_t r = 0; r < 4; ++r) {
    CHECK(serial[r].log.snapshots == parallel[r].log.snapshots);
    Scenario single = s;
    single.seed = s.seed + r;
    CHECK(run(single).log.snapshots == serial[r].log.snapshots);
  }
  CHECK_THROWS_AS(run_replications(s, 0, 1), InvalidArgument);
}

TEST_CASE("coverage map of a run respects the clip range") {
  const auto r = run(small_reference(5));
  for (double v : r.coverage.values) {
    CHECK(v >= -100.0);
    CHECK(v <= -80.0);
  }
}

TEST_CASE("scenario validation") {
  Scenario s = small_reference(1);
  s.tx_powers_dbm.clear();
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  s = small_reference(1);
  s.traffic_shares = {1.0};
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  s = small_reference(1);
  s.area = {0, 0, 0, 100};
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  s = small_reference(1);
  s.report.smoothing_window = 2;
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
}
