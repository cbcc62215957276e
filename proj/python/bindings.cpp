#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <vector>

#include "airbs/baseline.hpp"
#include "airbs/channel.hpp"
#include "airbs/error.hpp"
#include "airbs/report.hpp"
#include "airbs/scenario_io.hpp"
#include "airbs/simulator.hpp"
#include "airbs/utility.hpp"

namespace py = pybind11;
using namespace airbs;

namespace {

using Xyz = std::array<double, 3>;

const double default_gain = ChannelParams{}.ref_gain_db;
const double default_ref = ChannelParams{}.ref_distance_m;
const UtilityConfig d{};

Position to_position(const Xyz& v) { return {v[0], v[1], v[2]}; }
Xyz to_xyz(const Vec3& v) { return {v.x, v.y, v.z}; }

std::vector<Placement> to_placements(const std::vector<Xyz>& positions, const std::vector<double>& tx_powers_dbm,
                                     double ref_gain_db, double ref_distance_m) {
  if (positions.size() != tx_powers_dbm.size()) throw InvalidArgument("positions and tx powers differ in length");
  std::vector<Placement> out;
  for (std::size_t b = 0; b < positions.size(); ++b) {
    out.push_back({to_position(positions[b]), ChannelParams{ref_gain_db, ref_distance_m, tx_powers_dbm[b]}});
  }
  return out;
}

std::vector<WeightedUser> to_users(const std::vector<Xyz>& locations, const std::vector<double>& weights) {
  std::vector<Position> pos;
  for (const auto& x : locations) pos.push_back(to_position(x));
  if (weights.empty()) return uniform_users(pos);
  if (weights.size() != pos.size()) throw InvalidArgument("weights and user locations differ in length");
  std::vector<WeightedUser> users;
  for (std::size_t m = 0; m < pos.size(); ++m) users.push_back({pos[m], weights[m]});
  return users;
}

UtilityConfig make_config(const std::string& family, double noise_dbm, double p_min_dbm, double delta_db,
                          double softmax_alpha) {
  UtilityConfig cfg{utility_family_from_string(family), noise_dbm, p_min_dbm, delta_db, softmax_alpha};
  cfg.validate();
  return cfg;
}

py::dict run_to_dict(const RunResult& r) {
  py::list snapshots;
  for (const auto& snap : r.log.snapshots) {
    py::list row;
    for (const auto& p : snap) row.append(to_xyz(p));
    snapshots.append(row);
  }
  py::dict d;
  d["snapshots"] = snapshots;
  d["oracle_utility"] = r.log.oracle_utility;
  d["exact_utility"] = r.log.exact_utility;
  d["served_initial"] = r.metrics.initial.served_count;
  d["served_final"] = r.metrics.final.served_count;
  d["total_mus"] = r.metrics.final.total_mus;
  d["per_mu_max_power_dbm"] = r.metrics.final.per_mu_max_power_dbm;
  if (r.metrics.kmeans) {
    d["kmeans_served"] = r.metrics.kmeans->served_count;
  } else {
    d["kmeans_served"] = py::none();
  }
  d["trajectory_csv"] = trajectory_csv(r.log);
  d["metrics_json"] = metrics_json(r.metrics);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Stochastic-gradient AirBS placement: channel, utilities, simulator and k-means baseline.";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<CoincidentPointsError>(m, "CoincidentPointsError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);


  m.def(
      "free_space_power_dbm",
      [](const Xyz& bs, const Xyz& mu, double tx_power_dbm, double ref_gain_db, double ref_distance_m) {
        return free_space_power_dbm(to_position(bs), to_position(mu), {ref_gain_db, ref_distance_m, tx_power_dbm});
      },
      py::arg("bs"), py::arg("mu"), py::arg("tx_power_dbm"), py::arg("ref_gain_db") = default_gain,
      py::arg("ref_distance_m") = default_ref);
  m.def(
      "free_space_power_gradient",
      [](const Xyz& bs, const Xyz& mu) { return to_xyz(free_space_power_gradient(to_position(bs), to_position(mu), {})); },
      py::arg("bs"), py::arg("mu"));
  m.def("dbm_to_linear", &dbm_to_linear);
  m.def("linear_to_dbm", &linear_to_dbm);

  m.def(
      "smooth_max_dbm", [](const std::vector<double>& p, double alpha) { return smooth_max_dbm(p, alpha); },
      py::arg("powers_dbm"), py::arg("alpha") = 1.0);
  m.def(
      "softmax_weights", [](const std::vector<double>& p, double alpha) { return softmax_weights(p, alpha); },
      py::arg("powers_dbm"), py::arg("alpha") = 1.0);
  m.def("sigmoid_delta", &sigmoid_delta, py::arg("x"), py::arg("delta"));
  m.def("sigmoid_delta_deriv", &sigmoid_delta_deriv, py::arg("x"), py::arg("delta"));

  m.def(
      "user_utility",
      [](const std::vector<double>& p, const std::string& family, double noise, double p_min, double delta,
         double alpha) { return user_utility(p, make_config(family, noise, p_min, delta, alpha)); },
      py::arg("powers_dbm"), py::arg("family") = "threshold_sigmoid_unicast", py::arg("noise_dbm") = d.noise_dbm,
      py::arg("p_min_dbm") = d.p_min_dbm, py::arg("delta_db") = d.delta_db, py::arg("softmax_alpha") = d.softmax_alpha);
  m.def(
      "user_utility_partials",
      [](const std::vector<double>& p, const std::string& family, double noise, double p_min, double delta,
         double alpha) { return user_utility_partials(p, make_config(family, noise, p_min, delta, alpha)); },
      py::arg("powers_dbm"), py::arg("family") = "threshold_sigmoid_unicast", py::arg("noise_dbm") = d.noise_dbm,
      py::arg("p_min_dbm") = d.p_min_dbm, py::arg("delta_db") = d.delta_db, py::arg("softmax_alpha") = d.softmax_alpha);

  m.def(
      "network_utility",
      [](const std::vector<Xyz>& positions, const std::vector<double>& tx, const std::vector<Xyz>& users,
         const std::vector<double>& weights, const std::string& family, double p_min, double delta, double alpha) {
        const auto sites = to_placements(positions, tx, default_gain, default_ref);
        return network_utility(sites, to_users(users, weights), make_config(family, d.noise_dbm, p_min, delta, alpha),
                               free_space_channel());
      },
      py::arg("positions"), py::arg("tx_powers_dbm"), py::arg("users"), py::arg("weights") = std::vector<double>{},
      py::arg("family") = "threshold_sigmoid_unicast", py::arg("p_min_dbm") = d.p_min_dbm,
      py::arg("delta_db") = d.delta_db, py::arg("softmax_alpha") = d.softmax_alpha);
  m.def(
      "network_utility_gradient",
      [](const std::vector<Xyz>& positions, const std::vector<double>& tx, const std::vector<Xyz>& users,
         const std::vector<double>& weights, const std::string& family, double p_min, double delta, double alpha) {
        const auto sites = to_placements(positions, tx, default_gain, default_ref);
        std::vector<Xyz> out;
        for (const auto& g : network_utility_gradient(sites, to_users(users, weights),
                                                      make_config(family, d.noise_dbm, p_min, delta, alpha),
                                                      free_space_channel())) {
          out.push_back(to_xyz(g));
        }
        return out;
      },
      py::arg("positions"), py::arg("tx_powers_dbm"), py::arg("users"), py::arg("weights") = std::vector<double>{},
      py::arg("family") = "threshold_sigmoid_unicast", py::arg("p_min_dbm") = d.p_min_dbm,
      py::arg("delta_db") = d.delta_db, py::arg("softmax_alpha") = d.softmax_alpha);

  m.def(
      "kmeans_placement",
      [](const std::vector<Xyz>& users, std::size_t k, std::size_t max_iters, std::uint64_t seed, double height) {
        std::vector<Position> pos;
        for (const auto& x : users) pos.push_back(to_position(x));
        const auto r = kmeans_placement(pos, k, max_iters, seed, height);
        std::vector<Xyz> centroids;
        for (const auto& c : r.centroids) centroids.push_back(to_xyz(c));
        py::dict out;
        out["centroids"] = centroids;
        out["assignments"] = r.assignments;
        out["inertia"] = r.inertia;
        out["inertia_history"] = r.inertia_history;
        return out;
      },
      py::arg("users"), py::arg("num_clusters"), py::arg("max_iters") = 300, py::arg("seed") = 0,
      py::arg("height_m") = 0.0);

  m.def("reference_scenario_json", [] { return std::string(reference_scenario_json()); });
  m.def(
      "run_scenario",
      [](const std::string& json_text, std::optional<std::uint64_t> seed) {
        Scenario s = parse_scenario(json_text);
        if (seed) s.seed = *seed;
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run(s);
        }
        return run_to_dict(r);
      },
      py::arg("scenario_json"), py::arg("seed") = py::none(),
      "Runs a scenario given as JSON text and returns trajectories and coverage metrics.");
}
