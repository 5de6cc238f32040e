#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "homebot/error.hpp"
#include "homebot/motion/glyphs.hpp"
#include "homebot/motion/trajectory.hpp"
#include "homebot/scenario/config.hpp"
#include "homebot/scenario/runner.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace homebot;

namespace {

constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

// Config problems exit 1, everything after a valid config exits 2.
struct ConfigFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

scenario::ScenarioConfig load_config(const std::string& path, std::optional<std::uint64_t> seed) {
  try {
    auto cfg = scenario::load_scenario_file(path);
    if (seed) cfg = scenario::with_seed(cfg, *seed);
    return cfg;
  } catch (const std::exception& e) {
    throw ConfigFailure(e.what());
  }
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

int cmd_run(const std::string& config, std::optional<std::uint64_t> seed, const std::string& out) {
  const auto cfg = load_config(config, seed);
  const auto result = scenario::run_scenario(cfg);
  const std::string metrics = scenario::to_json(result.metrics).dump(2) + "\n";
  if (out.empty()) {
    std::cout << result.log.to_jsonl();
    std::cerr << metrics;
  } else {
    fs::create_directories(out);
    result.log.write((fs::path(out) / "events.jsonl").string());
    write_file(fs::path(out) / "metrics.json", metrics);
    std::cout << metrics;
  }
  if (result.status != 0) {
    std::cerr << "run failed: " << result.error << "\n";
    return kRuntimeError;
  }
  return 0;
}

int cmd_batch(const std::string& config, int runs, unsigned threads, const std::string& out) {
  const auto cfg = load_config(config, std::nullopt);
  if (runs < 1) throw ConfigFailure("--runs must be positive");
  const auto results = scenario::run_batch(cfg, runs, threads);
  std::vector<scenario::RunMetrics> metrics;
  json per_run = json::array();
  int failures = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    metrics.push_back(results[i].metrics);
    auto j = scenario::to_json(results[i].metrics);
    j["seed"] = cfg.seed + i;
    j["status"] = results[i].status;
    per_run.push_back(j);
    if (results[i].status != 0) ++failures;
    if (!out.empty()) {
      fs::create_directories(out);
      results[i].log.write((fs::path(out) / ("run_" + std::to_string(cfg.seed + i) + ".jsonl")).string());
    }
  }
  json doc{{"batch", scenario::to_json(scenario::aggregate(metrics, cfg.timing_excluded_rooms))}, {"runs", per_run}};
  std::cout << doc.dump(2) << "\n";
  if (!out.empty()) write_file(fs::path(out) / "metrics.json", doc.dump(2) + "\n");
  return failures ? kRuntimeError : 0;
}

int cmd_metrics(const std::string& path) {
  std::vector<json> records;
  try {
    records = scenario::load_log(path);
  } catch (const std::exception& e) {
    throw ConfigFailure(e.what());
  }
  std::cout << scenario::to_json(scenario::compute_metrics(records)).dump(2) << "\n";
  return 0;
}

Eigen::VectorXd vector_of(const json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_array()) throw ConfigFailure("trajectory params: '" + key + "' must be a list");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j[key].size()));
  for (std::size_t i = 0; i < j[key].size(); ++i) {
    if (!j[key][i].is_number()) throw ConfigFailure("trajectory params: '" + key + "' must hold numbers");
    v(static_cast<Eigen::Index>(i)) = j[key][i].get<double>();
  }
  return v;
}

int cmd_trajectory(const std::string& path) {
  json j;
  std::ifstream in(path);
  if (!in) throw ConfigFailure("cannot read '" + path + "'");
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigFailure(path + ": " + e.what());
  }
  for (const auto& [key, value] : j.items()) {
    static const std::set<std::string> known{"start", "goal", "waypoints", "dt_waypoint", "amplitude", "play_weight",
                                             "step_size", "max_iterations", "tolerance", "lower", "upper",
                                             "velocity_limit"};
    if (!known.count(key)) throw ConfigFailure("trajectory params: unknown key '" + key + "'");
    (void)value;
  }
  motion::PlayfulParams p;
  motion::Trajectory seed;
  try {
    p.amplitude = j.value("amplitude", p.amplitude);
    p.play_weight = j.value("play_weight", p.play_weight);
    p.step_size = j.value("step_size", p.step_size);
    p.max_iterations = j.value("max_iterations", p.max_iterations);
    p.tolerance = j.value("tolerance", p.tolerance);
    p.velocity_limit = j.value("velocity_limit", p.velocity_limit);
    if (j.contains("lower")) p.bounds.lower = vector_of(j, "lower");
    if (j.contains("upper")) p.bounds.upper = vector_of(j, "upper");
    seed = motion::seed_straight(vector_of(j, "start"), vector_of(j, "goal"), j.value("waypoints", 30),
                                 j.value("dt_waypoint", 0.1));
  } catch (const json::exception& e) {
    throw ConfigFailure(path + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigFailure(path + ": " + e.what());
  }
  const auto result = motion::optimize(seed, p);
  std::cout << motion::trajectory_csv(result.trajectory);
  return 0;
}

Eigen::Vector2d point_of(const std::vector<double>& v, const char* name) {
  if (v.size() != 2) throw ConfigFailure(std::string(name) + " takes two numbers");
  return {v[0], v[1]};
}

int cmd_glyph(const std::string& ch, const std::vector<double>& center, const std::vector<double>& upper_right) {
  if (ch.size() != 1 || !motion::glyph_supported(ch[0]))
    throw ConfigFailure("glyph: expected one character from 0-9 or A-Z");
  const motion::CellAnchors anchors{point_of(center, "--center"), point_of(upper_right, "--upper-right")};
  try {
    std::cout << motion::glyph_csv(motion::glyph_strokes(ch[0], anchors));
  } catch (const InvalidArgument& e) {
    throw ConfigFailure(e.what());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulated home-assistance robot: scenarios, metrics and motion exports"};
  app.require_subcommand(1);

  std::string config, out, log_path, params, character;
  std::optional<std::uint64_t> seed;
  int runs = 20;
  unsigned threads = 0;
  bool csv = false;
  std::vector<double> center{0.0, 0.0}, upper_right{0.5, 0.5};

  auto* run = app.add_subcommand("run", "Run one scenario and write its event log and metrics");
  run->add_option("config", config, "Scenario JSON")->required();
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--out", out, "Directory for events.jsonl and metrics.json (default: log to stdout)");

  auto* batch = app.add_subcommand("batch", "Run consecutive seeds and aggregate their metrics");
  batch->add_option("config", config, "Scenario JSON")->required();
  batch->add_option("--runs", runs, "Number of runs")->required();
  batch->add_option("--threads", threads, "Worker threads (0: all cores)");
  batch->add_option("--out", out, "Directory for per-run logs and metrics.json");

  auto* metrics = app.add_subcommand("metrics", "Compute run metrics from an event log");
  metrics->add_option("log", log_path, "Event log (JSON lines)")->required();

  auto* traj = app.add_subcommand("export-trajectory", "Optimize a playful trajectory and print it as CSV");
  traj->add_option("params", params, "Trajectory parameter JSON")->required();
  traj->add_flag("--csv", csv, "CSV output (the only format)");

  auto* glyph = app.add_subcommand("glyph", "Print the strokes of a character as CSV");
  glyph->add_option("char", character, "Character 0-9 or A-Z")->required();
  glyph->add_flag("--csv", csv, "CSV output (the only format)");
  glyph->add_option("--center", center, "Cell center anchor x y")->expected(2);
  glyph->add_option("--upper-right", upper_right, "Cell upper-right anchor x y")->expected(2);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*run) return cmd_run(config, seed, out);
    if (*batch) return cmd_batch(config, runs, threads, out);
    if (*metrics) return cmd_metrics(log_path);
    if (*traj) return cmd_trajectory(params);
    if (*glyph) return cmd_glyph(character, center, upper_right);
  } catch (const ConfigFailure& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kConfigError;
}
