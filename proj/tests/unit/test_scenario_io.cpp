#include <doctest.h>

#include <nlohmann/json.hpp>

#include "airbs/error.hpp"
#include "airbs/scenario_io.hpp"

using namespace airbs;

TEST_CASE("reference scenario contents") {
  const Scenario s = reference_scenario();
  CHECK(s.num_airbs() == 5);
  CHECK(s.tx_powers_dbm == std::vector<double>{7, 9, 9, 9, 12});
  CHECK(s.total_mus() == 202);
  CHECK(s.area.width() == 7000.0);
  CHECK(s.init_region.width() == 3500.0);
  CHECK(s.utility.family == UtilityFamily::ThresholdSigmoidUnicast);
  CHECK(s.utility.p_min_dbm == -91.0);
  CHECK(s.utility.noise_dbm == -112.4);
  CHECK(s.schedule.minibatch_size == 50);
  CHECK(s.iterations == 100);
  CHECK(s.channel.ref_gain_db == -94.0);
  CHECK(s.channel.ref_distance_m == 1000.0);
  CHECK(load_scenario(AIRBS_SCENARIO_DIR "/picocell_7km.json") == s);
}

TEST_CASE("serialization round-trips") {
  Scenario s = reference_scenario();
  s.max_move_m = 40.0;
  s.measurement_noise.sigma_db = 1.5;
  s.traffic_shares.assign(s.total_mus(), 1.0 / static_cast<double>(s.total_mus()));
  s.schedule.kind = StepKind::InverseSqrt;
  s.utility.family = UtilityFamily::BroadcastRate;
  s.report.smoothing_window = 5;
  CHECK(parse_scenario(scenario_to_json(s)) == s);
  const Scenario ref = reference_scenario();
  CHECK(parse_scenario(scenario_to_json(ref)) == ref);
}

TEST_CASE("missing keys take defaults") {
  const Scenario s = parse_scenario(R"({"version": 1, "tx_powers_dbm": [9]})");
  CHECK(s.num_airbs() == 1);
  CHECK(s.num_mus == Scenario{}.num_mus);
  CHECK(s.utility == UtilityConfig{});
}

TEST_CASE("malformed scenarios are rejected") {
  CHECK_THROWS_AS(parse_scenario("{not json"), InvalidArgument);
  CHECK_THROWS_AS(parse_scenario(R"({"version": 2})"), InvalidArgument);
  CHECK_THROWS_AS(parse_scenario(R"({"version": 1, "itterations": 5})"), InvalidArgument);
  CHECK_THROWS_AS(parse_scenario(R"({"version": 1, "utility": {"family": "nope"}})"), InvalidArgument);
  CHECK_THROWS_AS(parse_scenario(R"({"version": 1, "utility": {"delta_db": 0}})"), InvalidArgument);
  CHECK_THROWS_AS(parse_scenario(R"({"version": 1, "schedule": {"minibatch_size": 0}})"), InvalidArgument);
  CHECK_THROWS_AS(parse_scenario(R"({"version": 1, "extra_mu_positions": [[1]]})"), InvalidArgument);
}

TEST_CASE("unreadable files raise an I/O error naming the path") {
  try {
    load_scenario("/nonexistent/where.json");
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("/nonexistent/where.json") != std::string::npos);
  }
}
