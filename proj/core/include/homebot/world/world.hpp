#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "homebot/rng.hpp"
#include "homebot/world/map.hpp"

namespace homebot::world {

enum class FallDirection { Forward, Backward, Left, Right };

std::string_view to_string(FallDirection d);
FallDirection fall_direction_from_string(std::string_view s);

/// Unit vector of a fall relative to the pre-fall heading.
Vec2 fall_vector(double heading, FallDirection d);

/// Ground-truth vital signs of a simulated person.
struct VitalsProfile {
  double hand_blueness = 0.05;         // [0,1]
  double chin_pitch_deg = 20.0;        // chin up positive
  std::string face_orientation = "front";  // front | side | down
  double breathing_interval = 4.0;     // seconds; <= 0 means absent
  double breathing_cv = 0.05;          // coefficient of variation of intervals
  std::string bleeding_location = "none";
  double bleeding_rate_cm2_s = 0.0;
};

// Scripted agent actions. Each action starts once the previous one has
// finished and, when `at` is set, not before that clock time.
struct MoveTo {
  std::vector<Vec2> waypoints;
  double speed = 0.5;
};
struct Wait {
  double duration = 0.0;
};
struct Fall {
  FallDirection direction = FallDirection::Forward;
};
struct StandUp {};
struct SetContact {
  std::string sensor_id;
  bool open = true;
};
struct Exit {};
struct Enter {
  Vec2 position = Vec2::Zero();
};
struct SetHeading {
  double heading = 0.0;
};
using ActionKind = std::variant<MoveTo, Wait, Fall, StandUp, SetContact, Exit, Enter, SetHeading>;

struct ScriptedAction {
  std::optional<double> at;
  ActionKind action;
};

struct AgentState {
  std::string id;
  Vec2 position = Vec2::Zero();
  double heading = 0.0;
  bool fallen = false;
  FallDirection fall_direction = FallDirection::Forward;
  double fall_time = -1.0;
  double lying_length = 0.0;  // feet-to-head length on the floor when curled; 0 means body_height
  bool away = false;  // left the home; not perceived by any sensor
  double body_height = 1.7;
  double face_height_offset = 1.55;
  double face_width = 0.15;
  double shoulder_width = 0.45;
  double body_width = 0.35;
  double skin_temperature = 33.0;
  double breathing_interval = 4.0;  // <= 0: not breathing
  double breathing_cv = 0.0;        // log-normal variability of successive intervals
  double next_exhale = 4.0;
  double responsiveness = 1.0;
  double response_delay = 2.0;
  VitalsProfile vitals_truth;

  std::vector<ScriptedAction> script;
  std::size_t script_cursor = 0;
  double action_elapsed = 0.0;
  std::size_t waypoint_cursor = 0;
  bool blocked = false;
  Vec2 last_step_displacement = Vec2::Zero();

  [[nodiscard]] bool breathing() const { return breathing_interval > 0.0; }
  [[nodiscard]] double lying_extent() const { return lying_length > 0.0 ? lying_length : body_height; }
  /// Center of the face in the horizontal plane.
  [[nodiscard]] Vec2 face_position() const;
  /// Height of the face center above the floor in the current pose.
  [[nodiscard]] double face_height() const;
  /// Cells covered by the body: the standing cell, or every cell under a
  /// lying body from feet to head.
  [[nodiscard]] std::vector<Cell> footprint(const HomeMap& map) const;
};

enum class RobotMode { Idle, Dispatching, Dialogue, Triage, SeekingHelp };
std::string_view to_string(RobotMode mode);

struct RobotState {
  Vec2 position = Vec2::Zero();
  double heading = 0.0;
  double speed = 0.3;      // m/s
  double turn_rate = 0.6;  // rad/s, in-place rotation
  RobotMode mode = RobotMode::Idle;
  Vec2 home_position = Vec2::Zero();
  double home_heading = 0.0;
};

/// Heat-emitting object that is not part of the known map (e.g. a kettle).
struct Prop {
  std::string name;
  Vec2 position = Vec2::Zero();
  double extent = 0.2;
  double initial_temperature = 60.0;
  double ambient_temperature = 22.0;
  double cooling_time_constant = 600.0;
  double placed_at = 0.0;
  [[nodiscard]] double temperature(double clock) const;
};

struct Exhalation {
  std::string agent_id;
  Vec2 position = Vec2::Zero();
  double time = 0.0;
};

struct ContactAction {
  std::string sensor_id;
  bool open = true;
  double time = 0.0;
};

/// Gas emission point that is not an agent's breath.
struct GasSource {
  Vec2 position = Vec2::Zero();
  double emission_rate = 0.0;
};

struct WorldConfig {
  double plume_lifetime = 3.0;  // seconds a puff contributes before it is dropped from memory
};

struct WorldState {
  double clock = 0.0;
  std::uint64_t tick = 0;
  HomeMap map;
  std::vector<AgentState> agents;
  RobotState robot;
  std::vector<Prop> props;
  std::vector<GasSource> gas_field_sources;
  std::vector<Exhalation> exhalations;        // recent puffs, pruned by age
  std::vector<Exhalation> step_exhalations;   // emitted during the last step
  std::vector<ContactAction> step_contacts;   // scripted contact actions during the last step
  WorldConfig config;
  Rng rng{0};

  [[nodiscard]] const AgentState* find_agent(std::string_view id) const;
  AgentState* find_agent(std::string_view id);
};

/// Advances the world by `dt` seconds: scripted actions run, agents move with
/// grid collision checks, exhalations are emitted on each agent's schedule.
/// Fallen agents do not move. Throws InvalidArgument if dt <= 0.
WorldState step_world(WorldState state, double dt = 0.1);

}  // namespace homebot::world
