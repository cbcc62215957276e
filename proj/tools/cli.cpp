#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "airbs/error.hpp"
#include "airbs/report.hpp"
#include "airbs/scenario_io.hpp"
#include "airbs/simulator.hpp"

namespace airbs::cli {

namespace {

namespace fs = std::filesystem;

// Single-realization figures printed next to each seed for comparison.
constexpr std::size_t kReferenceServed = 198;
constexpr std::size_t kReferenceKMeansUnserved = 73;

struct RunConfig {
  std::string scenario_path;
  std::optional<std::uint64_t> seed;
  std::size_t replications = 1;
  std::string out_dir;
  std::optional<std::size_t> threads;
  std::string baseline = "kmeans";
  std::string axis;
  std::vector<double> values;
};

std::string fmt(double v, int precision = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::size_t threads_for(const RunConfig& cfg) { return cfg.threads.value_or(default_thread_count()); }

fs::path replication_dir(const fs::path& root, std::size_t r, std::size_t count) {
  if (count == 1) return root;
  char name[32];
  std::snprintf(name, sizeof name, "rep_%03zu", r);
  return root / name;
}

void write_outputs(const Scenario& s, const RunResult& result, const fs::path& dir) {
  render_outputs(result.log, result.metrics, result.coverage, result.mus, dir, s.report.smoothing_window);
  write_text_file(dir / "effective_config.json", scenario_to_json(s));
}

std::string summary_line(std::uint64_t seed, const RunResult& r) {
  const auto& m = r.metrics;
  std::ostringstream line;
  line << "seed " << seed << ": served " << m.final.served_count << "/" << m.final.total_mus << " ("
       << fmt(static_cast<double>(m.final.served_count) / static_cast<double>(m.final.total_mus)) << ")"
       << ", oracle utility " << fmt(m.initial_oracle_utility) << " -> " << fmt(m.final_oracle_utility);
  return line.str();
}

int cmd_run(const RunConfig& cfg, std::ostream& out) {
  Scenario s = load_scenario(cfg.scenario_path);
  if (cfg.seed) s.seed = *cfg.seed;
  const auto results = run_replications(s, cfg.replications, threads_for(cfg));

  std::vector<double> served;
  for (std::size_t r = 0; r < results.size(); ++r) {
    Scenario rep = s;
    rep.seed = s.seed + r;
    write_outputs(rep, results[r], replication_dir(cfg.out_dir, r, results.size()));
    out << summary_line(rep.seed, results[r]) << "\n";
    served.push_back(static_cast<double>(results[r].metrics.final.served_count));
  }
  if (results.size() > 1) {
    out << "median served " << fmt(median(served), 1) << "/" << s.total_mus() << " over " << results.size()
        << " replications\n";
  }
  return kExitOk;
}

int cmd_reproduce(const RunConfig& cfg, std::ostream& out) {
  Scenario s = reference_scenario();
  if (cfg.seed) s.seed = *cfg.seed;
  s.compare_kmeans = cfg.baseline == "kmeans";
  const auto results = run_replications(s, cfg.replications, threads_for(cfg));

  std::vector<double> served, km_unserved;
  std::ostringstream csv;
  csv << "seed,served,total,served_fraction,final_oracle_utility,kmeans_unserved\n";
  for (std::size_t r = 0; r < results.size(); ++r) {
    Scenario rep = s;
    rep.seed = s.seed + r;
    const auto& m = results[r].metrics;
    write_outputs(rep, results[r], replication_dir(cfg.out_dir, r, results.size()));
    std::string line = summary_line(rep.seed, results[r]) + " [reference run: " + std::to_string(kReferenceServed) +
                       "/" + std::to_string(m.final.total_mus) + "]";
    served.push_back(static_cast<double>(m.final.served_count));
    std::string km_field;
    if (m.kmeans) {
      const auto unserved = m.kmeans->total_mus - m.kmeans->served_count;
      km_unserved.push_back(static_cast<double>(unserved));
      km_field = std::to_string(unserved);
      line += ", k-means unserved " + km_field + " [reference run: " + std::to_string(kReferenceKMeansUnserved) + "]";
    }
    out << line << "\n";
    csv << rep.seed << ',' << m.final.served_count << ',' << m.final.total_mus << ','
        << format_number(static_cast<double>(m.final.served_count) / static_cast<double>(m.final.total_mus)) << ','
        << format_number(m.final_oracle_utility) << ',' << km_field << '\n';
  }
  fs::create_directories(cfg.out_dir);
  write_text_file(fs::path(cfg.out_dir) / "summary.csv", csv.str());
  if (results.size() > 1) {
    const double med = median(served);
    out << "median served " << fmt(med, 1) << "/" << s.total_mus() << " (fraction "
        << fmt(med / static_cast<double>(s.total_mus())) << ") over " << results.size() << " seeds\n";
    if (!km_unserved.empty()) {
      out << "median k-means unserved " << fmt(median(km_unserved), 1) << " over " << results.size() << " seeds\n";
    }
  }
  return kExitOk;
}

void apply_axis(Scenario& s, const std::string& axis, double v) {
  static const std::map<std::string, void (*)(Scenario&, double)> setters = {
      {"eta", [](Scenario& x, double v) { x.schedule.eta = v; }},
      {"minibatch_size", [](Scenario& x, double v) { x.schedule.minibatch_size = static_cast<std::size_t>(v); }},
      {"softmax_alpha", [](Scenario& x, double v) { x.utility.softmax_alpha = v; }},
      {"delta_db", [](Scenario& x, double v) { x.utility.delta_db = v; }},
      {"p_min_dbm", [](Scenario& x, double v) { x.utility.p_min_dbm = v; }},
      {"iterations", [](Scenario& x, double v) { x.iterations = static_cast<std::size_t>(v); }},
      {"length_unit_m", [](Scenario& x, double v) { x.schedule.length_unit_m = v; }},
      {"measurement_noise_db", [](Scenario& x, double v) { x.measurement_noise.sigma_db = v; }},
  };
  const auto it = setters.find(axis);
  if (it == setters.end()) {
    std::string names;
    for (const auto& [name, fn] : setters) names += (names.empty() ? "" : ", ") + name;
    throw InvalidArgument("unknown sweep axis '" + axis + "' (expected one of: " + names + ")");
  }
  it->second(s, v);
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  const Scenario base = load_scenario(cfg.scenario_path);
  if (cfg.values.empty()) throw InvalidArgument("sweep needs at least one value");
  // Validate every point before running any.
  std::vector<Scenario> points;
  for (double v : cfg.values) {
    Scenario s = base;
    if (cfg.seed) s.seed = *cfg.seed;
    apply_axis(s, cfg.axis, v);
    s.validate();
    points.push_back(std::move(s));
  }

  std::ostringstream csv;
  csv << "axis,value,seed,served,total,served_fraction,final_oracle_utility\n";
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto results = run_replications(points[k], cfg.replications, threads_for(cfg));
    for (std::size_t r = 0; r < results.size(); ++r) {
      const auto& m = results[r].metrics;
      const std::uint64_t seed = points[k].seed + r;
      csv << cfg.axis << ',' << format_number(cfg.values[k]) << ',' << seed << ',' << m.final.served_count << ','
          << m.final.total_mus << ','
          << format_number(static_cast<double>(m.final.served_count) / static_cast<double>(m.final.total_mus))
          << ',' << format_number(m.final_oracle_utility) << '\n';
      out << cfg.axis << "=" << format_number(cfg.values[k]) << " " << summary_line(seed, results[r]) << "\n";
    }
  }
  fs::create_directories(cfg.out_dir);
  write_text_file(fs::path(cfg.out_dir) / "sweep.csv", csv.str());
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Non-cooperative AirBS placement by stochastic gradient ascent", "airbs-sgd"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* run = app.add_subcommand("run", "Run a scenario file");
  run->add_option("--scenario", cfg.scenario_path, "Scenario JSON file")->required();
  run->add_option("--seed", cfg.seed, "Override the scenario seed");
  run->add_option("--replications", cfg.replications, "Number of replications (seeds seed..seed+K-1)")
      ->check(CLI::PositiveNumber);
  run->add_option("--out", cfg.out_dir, "Output directory")->default_val("airbs_out");
  run->add_option("--threads", cfg.threads, "Worker threads (default: AIRBS_SGD_THREADS or hardware)")
      ->check(CLI::PositiveNumber);

  auto* repro = app.add_subcommand("reproduce-paper", "Run the built-in 7 km picocell scenario");
  repro->add_option("--seeds", cfg.replications, "Number of seeds")->check(CLI::PositiveNumber);
  repro->add_option("--seed", cfg.seed, "First seed");
  repro->add_option("--baseline", cfg.baseline, "Comparison baseline")
      ->check(CLI::IsMember({"kmeans", "none"}))
      ->default_val("kmeans");
  repro->add_option("--out", cfg.out_dir, "Output directory")->default_val("reproduce_out");
  repro->add_option("--threads", cfg.threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* sweep = app.add_subcommand("sweep", "Sweep one scenario parameter");
  sweep->add_option("--scenario", cfg.scenario_path, "Scenario JSON file")->required();
  sweep->add_option("--axis", cfg.axis, "Parameter to vary")->required();
  sweep->add_option("--values", cfg.values, "Comma-separated values")->required()->delimiter(',');
  sweep->add_option("--seeds", cfg.replications, "Seeds per value")->check(CLI::PositiveNumber);
  sweep->add_option("--seed", cfg.seed, "First seed");
  sweep->add_option("--out", cfg.out_dir, "Output directory")->default_val("sweep_out");
  sweep->add_option("--threads", cfg.threads, "Worker threads")->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "airbs-sgd: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*run) return cmd_run(cfg, out);
    if (*repro) return cmd_reproduce(cfg, out);
    if (*sweep) return cmd_sweep(cfg, out);
  } catch (const IoError& e) {
    // A missing or unreadable input is a configuration problem, not a run failure.
    const bool input = !cfg.scenario_path.empty() && !fs::exists(cfg.scenario_path);
    err << "airbs-sgd: " << e.what() << "\n";
    return input ? kExitUsage : kExitFailure;
  } catch (const InvalidArgument& e) {
    err << "airbs-sgd: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "airbs-sgd: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace airbs::cli
