#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "homebot/detection/anomaly.hpp"
#include "homebot/detection/fallen.hpp"
#include "homebot/planning/tour.hpp"
#include "homebot/sensors/sensors.hpp"
#include "homebot/triage/fixtures.hpp"
#include "homebot/world/world.hpp"

namespace homebot::scenario {

using world::Vec2;

/// Simulated activity corpus used to train the anomaly forest.
struct CorpusConfig {
  int normal_episodes = 30;
  int sleep_episodes = 6;
  int away_episodes = 6;
  int fall_episodes = 16;
  int night_exit_episodes = 8;
  int cooking_episodes = 8;
  double episode_length = 600.0;  // seconds
  double sample_every = 5.0;      // seconds between feature vectors
  double fall_label_delay = 60.0; // stillness after a fall before it counts as anomalous
  double warmup = 30.0;           // seconds of history before the first sample; runs classify no earlier
  std::uint64_t seed = 7;
};

struct DetectionSection {
  detection::FeatureConfig features;
  double classify_period = 1.0;  // seconds between forest evaluations
  int confirm_count = 3;         // consecutive anomalous verdicts before dispatch
  double rearm_delay = 300.0;    // seconds after an incident before monitoring resumes
  detection::ForestParams forest;
  std::string forest_model;      // optional path; trained from the corpus when empty
  CorpusConfig corpus;
  detection::FallenThresholds fallen;
  sensors::LaserConfig laser;
};

struct PlanningSection {
  double approach_distance = 0.6;  // metres kept from a person
  bool help_enabled = true;        // seek help after a Red report when bystanders exist
  double help_budget = 300.0;      // seconds
  double help_reach = 0.8;         // metres at which a bystander counts as reached
  planning::HelpfulnessParams helpfulness;
  sensors::FaceConfig faces;
};

struct MotionSection {
  double speed = 0.3;      // m/s
  double turn_rate = 0.6;  // rad/s
};

struct TriageSection {
  double observation = 30.0;  // seconds spent observing vital signs
  triage::TriageThresholds thresholds;
  triage::FixtureNoise noise;
};

struct DialogueSection {
  double accuracy = 0.769;  // probability the heard answer equals the spoken one
  double timeout = 10.0;    // seconds
};

struct ScenarioConfig {
  std::string name;
  std::string map_path;  // empty: bundled apartment
  world::HomeMap map;
  std::uint64_t seed = 0;
  double duration = 600.0;
  double dt = 0.1;
  double start_time_of_day = 10.0 * 3600.0;  // seconds after midnight at clock 0
  std::vector<world::AgentState> agents;
  std::vector<world::Prop> props;
  Vec2 robot_home = Vec2::Zero();
  double robot_heading = 0.0;
  std::vector<std::string> timing_excluded_rooms{"bathroom"};
  DetectionSection detection;
  PlanningSection planning;
  MotionSection motion;
  TriageSection triage;
  DialogueSection dialogue;
  sensors::GasModel gas;

  nlohmann::json source;  // the parsed document, kept for re-seeding
  std::string base_dir = ".";
};

/// Parses and validates a scenario document. Relative paths resolve
/// against `base_dir`. Throws ParseError or ValidationError naming the
/// offending field.
ScenarioConfig parse_scenario(const nlohmann::json& doc, const std::string& base_dir = ".");
ScenarioConfig load_scenario_file(const std::string& path);

/// The same scenario under another seed. Randomized placements are drawn
/// again from the new seed.
ScenarioConfig with_seed(const ScenarioConfig& cfg, std::uint64_t seed);

/// Invariants: p in [0,1], positive duration and dt, agents and robot on
/// free cells, script sensors exist, referenced files exist.
void validate(const ScenarioConfig& cfg);

}  // namespace homebot::scenario
