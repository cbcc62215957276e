#include "airbs/scenario_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "airbs/error.hpp"

namespace airbs {

namespace detail {
extern const std::string_view kReferenceScenarioJson;
}

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.contains(key)) throw InvalidArgument("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (auto it = obj.find(key); it != obj.end()) out = it->get<T>();
}

Rect read_rect(const json& j, const std::string& where) {
  reject_unknown(j, {"x_min", "y_min", "x_max", "y_max"}, where);
  return {j.at("x_min").get<double>(), j.at("y_min").get<double>(), j.at("x_max").get<double>(),
          j.at("y_max").get<double>()};
}

json rect_json(const Rect& r) {
  return {{"x_min", r.x_min}, {"y_min", r.y_min}, {"x_max", r.x_max}, {"y_max", r.y_max}};
}

Position read_position(const json& j) {
  if (!j.is_array() || j.size() < 2 || j.size() > 3) throw InvalidArgument("positions are [x, y] or [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j.size() == 3 ? j[2].get<double>() : 0.0};
}

std::pair<double, double> read_pair(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2) throw InvalidArgument(std::string(what) + " must be a two-element array");
  return {j[0].get<double>(), j[1].get<double>()};
}

Scenario from_json(const json& j) {
  if (!j.is_object()) throw InvalidArgument("scenario document must be a JSON object");
  reject_unknown(j,
                 {"version", "name", "area", "init_region", "num_airbs", "tx_powers_dbm", "airbs_height_m",
                  "fix_height", "num_mus", "extra_mu_positions", "traffic_shares", "channel", "utility", "schedule",
                  "iterations", "seed", "measurement_noise_db", "max_move_m", "compare_kmeans", "kmeans_max_iters",
                  "report"},
                 "scenario");
  if (auto it = j.find("version"); it != j.end() && it->get<int>() != kFormatVersion) {
    throw InvalidArgument("unsupported scenario version " + it->dump());
  }

  Scenario s;
  read(j, "name", s.name);
  if (j.contains("area")) s.area = read_rect(j.at("area"), "area");
  if (j.contains("init_region")) s.init_region = read_rect(j.at("init_region"), "init_region");
  read(j, "tx_powers_dbm", s.tx_powers_dbm);
  if (auto it = j.find("num_airbs"); it != j.end() && it->get<std::size_t>() != s.tx_powers_dbm.size()) {
    throw InvalidArgument("num_airbs does not match the length of tx_powers_dbm");
  }
  read(j, "airbs_height_m", s.airbs_height_m);
  read(j, "fix_height", s.fix_height);
  read(j, "num_mus", s.num_mus);
  if (auto it = j.find("extra_mu_positions"); it != j.end()) {
    s.extra_mu_positions.clear();
    for (const auto& p : *it) s.extra_mu_positions.push_back(read_position(p));
  }
  read(j, "traffic_shares", s.traffic_shares);

  if (auto it = j.find("channel"); it != j.end()) {
    reject_unknown(*it, {"ref_gain_db", "ref_distance_m"}, "channel");
    read(*it, "ref_gain_db", s.channel.ref_gain_db);
    read(*it, "ref_distance_m", s.channel.ref_distance_m);
  }
  if (auto it = j.find("utility"); it != j.end()) {
    reject_unknown(*it, {"family", "noise_dbm", "p_min_dbm", "delta_db", "softmax_alpha"}, "utility");
    if (it->contains("family")) s.utility.family = utility_family_from_string(it->at("family").get<std::string>());
    read(*it, "noise_dbm", s.utility.noise_dbm);
    read(*it, "p_min_dbm", s.utility.p_min_dbm);
    read(*it, "delta_db", s.utility.delta_db);
    read(*it, "softmax_alpha", s.utility.softmax_alpha);
  }
  if (auto it = j.find("schedule"); it != j.end()) {
    reject_unknown(*it, {"kind", "eta", "decay_iterations", "minibatch_size", "length_unit_m"}, "schedule");
    if (it->contains("kind")) s.schedule.kind = step_kind_from_string(it->at("kind").get<std::string>());
    read(*it, "eta", s.schedule.eta);
    read(*it, "decay_iterations", s.schedule.decay_iterations);
    read(*it, "minibatch_size", s.schedule.minibatch_size);
    read(*it, "length_unit_m", s.schedule.length_unit_m);
  }
  read(j, "iterations", s.iterations);
  read(j, "seed", s.seed);
  read(j, "measurement_noise_db", s.measurement_noise.sigma_db);
  if (auto it = j.find("max_move_m"); it != j.end()) {
    s.max_move_m = it->is_null() ? std::nullopt : std::optional<double>(it->get<double>());
  }
  read(j, "compare_kmeans", s.compare_kmeans);
  read(j, "kmeans_max_iters", s.kmeans_max_iters);

  if (auto it = j.find("report"); it != j.end()) {
    reject_unknown(*it, {"histogram_bin_db", "histogram_range_dbm", "grid", "clip_dbm", "smoothing_window"},
                   "report");
    read(*it, "histogram_bin_db", s.report.histogram.bin_width_db);
    if (it->contains("histogram_range_dbm")) {
      std::tie(s.report.histogram.lo_dbm, s.report.histogram.hi_dbm) =
          read_pair(it->at("histogram_range_dbm"), "histogram_range_dbm");
    }
    if (it->contains("grid")) {
      const auto& g = it->at("grid");
      if (!g.is_array() || g.size() != 2) throw InvalidArgument("grid must be [nx, ny]");
      s.report.grid_nx = g[0].get<std::size_t>();
      s.report.grid_ny = g[1].get<std::size_t>();
    }
    if (it->contains("clip_dbm")) {
      std::tie(s.report.clip_lo_dbm, s.report.clip_hi_dbm) = read_pair(it->at("clip_dbm"), "clip_dbm");
    }
    read(*it, "smoothing_window", s.report.smoothing_window);
  }
  s.validate();
  return s;
}

}  // namespace

Scenario parse_scenario(std::string_view json_text) {
  try {
    return from_json(json::parse(json_text));
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed scenario: ") + e.what());
  }
}

std::string scenario_to_json(const Scenario& s) {
  json extra = json::array();
  for (const auto& p : s.extra_mu_positions) extra.push_back({p.x, p.y, p.z});
  json j = {
      {"version", kFormatVersion},
      {"name", s.name},
      {"area", rect_json(s.area)},
      {"init_region", rect_json(s.init_region)},
      {"num_airbs", s.num_airbs()},
      {"tx_powers_dbm", s.tx_powers_dbm},
      {"airbs_height_m", s.airbs_height_m},
      {"fix_height", s.fix_height},
      {"num_mus", s.num_mus},
      {"extra_mu_positions", extra},
      {"traffic_shares", s.traffic_shares},
      {"channel", {{"ref_gain_db", s.channel.ref_gain_db}, {"ref_distance_m", s.channel.ref_distance_m}}},
      {"utility",
       {{"family", std::string(to_string(s.utility.family))},
        {"noise_dbm", s.utility.noise_dbm},
        {"p_min_dbm", s.utility.p_min_dbm},
        {"delta_db", s.utility.delta_db},
        {"softmax_alpha", s.utility.softmax_alpha}}},
      {"schedule",
       {{"kind", std::string(to_string(s.schedule.kind))},
        {"eta", s.schedule.eta},
        {"decay_iterations", s.schedule.decay_iterations},
        {"minibatch_size", s.schedule.minibatch_size},
        {"length_unit_m", s.schedule.length_unit_m}}},
      {"iterations", s.iterations},
      {"seed", s.seed},
      {"measurement_noise_db", s.measurement_noise.sigma_db},
      {"max_move_m", s.max_move_m ? json(*s.max_move_m) : json(nullptr)},
      {"compare_kmeans", s.compare_kmeans},
      {"kmeans_max_iters", s.kmeans_max_iters},
      {"report",
       {{"histogram_bin_db", s.report.histogram.bin_width_db},
        {"histogram_range_dbm", {s.report.histogram.lo_dbm, s.report.histogram.hi_dbm}},
        {"grid", {s.report.grid_nx, s.report.grid_ny}},
        {"clip_dbm", {s.report.clip_lo_dbm, s.report.clip_hi_dbm}},
        {"smoothing_window", s.report.smoothing_window}}},
  };
  return j.dump(2) + "\n";
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read scenario file '" + path.string() + "'");
  std::ostringstream text;
  text << f.rdbuf();
  try {
    return parse_scenario(text.str());
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
}

std::string_view reference_scenario_json() { return detail::kReferenceScenarioJson; }

Scenario reference_scenario() { return parse_scenario(reference_scenario_json()); }

}  // namespace airbs
