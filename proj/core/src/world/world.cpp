#include "homebot/world/world.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "homebot/error.hpp"

namespace homebot::world {

namespace {
constexpr double kTimeEps = 1e-9;
}

std::string_view to_string(FallDirection d) {
  switch (d) {
    case FallDirection::Forward: return "forward";
    case FallDirection::Backward: return "backward";
    case FallDirection::Left: return "left";
    case FallDirection::Right: return "right";
  }
  return "forward";
}

FallDirection fall_direction_from_string(std::string_view s) {
  if (s == "forward") return FallDirection::Forward;
  if (s == "backward") return FallDirection::Backward;
  if (s == "left") return FallDirection::Left;
  if (s == "right") return FallDirection::Right;
  throw ParseError("unknown fall direction '" + std::string(s) + "'");
}

Vec2 fall_vector(double heading, FallDirection d) {
  double a = heading;
  switch (d) {
    case FallDirection::Forward: break;
    case FallDirection::Backward: a += std::numbers::pi; break;
    case FallDirection::Left: a += std::numbers::pi / 2; break;
    case FallDirection::Right: a -= std::numbers::pi / 2; break;
  }
  return {std::cos(a), std::sin(a)};
}

std::string_view to_string(RobotMode mode) {
  switch (mode) {
    case RobotMode::Idle: return "idle";
    case RobotMode::Dispatching: return "dispatching";
    case RobotMode::Dialogue: return "dialogue";
    case RobotMode::Triage: return "triage";
    case RobotMode::SeekingHelp: return "seeking_help";
  }
  return "idle";
}

namespace {

bool segment_free(const HomeMap& map, const Vec2& a, const Vec2& b) {
  const int steps = std::max(1, static_cast<int>(std::ceil((b - a).norm() / (0.25 * map.cell_size()))));
  for (int i = 0; i <= steps; ++i)
    if (!map.is_free_point(a + (b - a) * (static_cast<double>(i) / steps))) return false;
  return true;
}

}  // namespace

Vec2 AgentState::face_position() const {
  if (!fallen) return position;
  // Fallen: `position` is the body center and the head lies along the fall vector.
  const Vec2 axis = fall_vector(heading, fall_direction);
  return position + axis * std::max(0.0, 0.5 * lying_extent() - 0.5 * (body_height - face_height_offset));
}

double AgentState::face_height() const { return fallen ? 0.12 : face_height_offset; }

std::vector<Cell> AgentState::footprint(const HomeMap& map) const {
  std::vector<Cell> cells{map.cell_of(position)};
  if (!fallen) return cells;
  const Vec2 axis = fall_vector(heading, fall_direction);
  const int steps = std::max(1, static_cast<int>(std::ceil(lying_extent() / (0.5 * map.cell_size()))));
  for (int i = 0; i <= steps; ++i) {
    const double s = -0.5 * lying_extent() + lying_extent() * i / steps;
    const Cell c = map.cell_of(position + s * axis);
    if (std::find(cells.begin(), cells.end(), c) == cells.end()) cells.push_back(c);
  }
  return cells;
}

double Prop::temperature(double clock) const {
  const double age = std::max(0.0, clock - placed_at);
  return ambient_temperature + (initial_temperature - ambient_temperature) * std::exp(-age / cooling_time_constant);
}

const AgentState* WorldState::find_agent(std::string_view id) const {
  for (const auto& a : agents)
    if (a.id == id) return &a;
  return nullptr;
}

AgentState* WorldState::find_agent(std::string_view id) {
  for (auto& a : agents)
    if (a.id == id) return &a;
  return nullptr;
}

namespace {

// Runs the agent's script for `dt` seconds. Instantaneous actions complete
// without consuming time, so several may run in one step.
void advance_script(AgentState& agent, const HomeMap& map, double clock_start, double dt,
                    std::vector<ContactAction>& contacts) {
  double remaining = dt;
  const Vec2 start = agent.position;
  int guard = 0;
  while (agent.script_cursor < agent.script.size() && ++guard < 1000) {
    ScriptedAction& step = agent.script[agent.script_cursor];
    const double now = clock_start + (dt - remaining);
    if (step.at && now + kTimeEps < *step.at) {
      const double idle = *step.at - now;
      if (idle >= remaining - kTimeEps) break;
      remaining -= idle;
      continue;
    }
    bool done = false;
    std::visit(
        [&](auto& act) {
          using T = std::decay_t<decltype(act)>;
          if constexpr (std::is_same_v<T, MoveTo>) {
            if (agent.fallen || agent.away) {
              done = true;
              return;
            }
            while (remaining > kTimeEps && agent.waypoint_cursor < act.waypoints.size()) {
              const Vec2 target = act.waypoints[agent.waypoint_cursor];
              const Vec2 delta = target - agent.position;
              const double dist = delta.norm();
              const double reach = act.speed * remaining;
              if (dist <= reach + 1e-12) {
                if (!map.is_free_point(target)) {
                  agent.blocked = true;
                  agent.waypoint_cursor = act.waypoints.size();
                  break;
                }
                agent.position = target;
                if (dist > 1e-12) agent.heading = std::atan2(delta.y(), delta.x());
                remaining -= dist / act.speed;
                ++agent.waypoint_cursor;
              } else {
                const Vec2 next = agent.position + delta * (reach / dist);
                if (!map.is_free_point(next)) {
                  agent.blocked = true;
                  agent.waypoint_cursor = act.waypoints.size();
                  break;
                }
                agent.position = next;
                agent.heading = std::atan2(delta.y(), delta.x());
                remaining = 0.0;
              }
            }
            if (agent.waypoint_cursor >= act.waypoints.size()) {
              agent.waypoint_cursor = 0;
              done = true;
            }
          } else if constexpr (std::is_same_v<T, Wait>) {
            const double left = act.duration - agent.action_elapsed;
            if (left <= remaining + kTimeEps) {
              remaining -= std::max(0.0, left);
              done = true;
            } else {
              agent.action_elapsed += remaining;
              remaining = 0.0;
            }
          } else if constexpr (std::is_same_v<T, Fall>) {
            if (!agent.fallen) {
              const Vec2 axis = fall_vector(agent.heading, act.direction);
              // The body lies from the feet along the axis. Against a wall it
              // slides back, and where even that fails it lies curled up.
              const double step = 0.5 * map.cell_size();
              bool placed = false;
              for (double len = agent.body_height; len > step && !placed; len -= step) {
                for (double back = 0.0; back <= len + 1e-9; back += step) {
                  const Vec2 center = agent.position + axis * (0.5 * len - back);
                  if (segment_free(map, center - 0.5 * len * axis, center + 0.5 * len * axis)) {
                    agent.position = center;
                    agent.lying_length = len;
                    placed = true;
                    break;
                  }
                }
              }
              if (!placed) agent.lying_length = step;
              agent.fallen = true;
              agent.fall_direction = act.direction;
              agent.fall_time = now;
            }
            done = true;
          } else if constexpr (std::is_same_v<T, StandUp>) {
            if (agent.fallen) {
              const Vec2 axis = fall_vector(agent.heading, agent.fall_direction);
              const Vec2 feet = agent.position - axis * (0.5 * agent.lying_extent());
              if (map.is_free_point(feet)) agent.position = feet;
              agent.fallen = false;
              agent.lying_length = 0.0;
            }
            done = true;
          } else if constexpr (std::is_same_v<T, SetContact>) {
            contacts.push_back({act.sensor_id, act.open, clock_start + dt});
            done = true;
          } else if constexpr (std::is_same_v<T, Exit>) {
            agent.away = true;
            done = true;
          } else if constexpr (std::is_same_v<T, Enter>) {
            agent.away = false;
            if (map.is_free_point(act.position)) agent.position = act.position;
            done = true;
          } else if constexpr (std::is_same_v<T, SetHeading>) {
            agent.heading = act.heading;
            done = true;
          }
        },
        step.action);
    if (!done) break;
    ++agent.script_cursor;
    agent.action_elapsed = 0.0;
  }
  agent.last_step_displacement = agent.position - start;
}

}  // namespace

WorldState step_world(WorldState state, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("step_world: dt must be positive");
  const double start = state.clock;
  state.tick += 1;
  state.clock = start + dt;
  state.step_exhalations.clear();
  state.step_contacts.clear();

  for (auto& agent : state.agents) {
    advance_script(agent, state.map, start, dt, state.step_contacts);
    if (agent.breathing()) {
      while (agent.next_exhale <= state.clock + kTimeEps) {
        if (!agent.away) state.step_exhalations.push_back({agent.id, agent.face_position(), agent.next_exhale});
        double interval = agent.breathing_interval;
        if (agent.breathing_cv > 0.0) {
          // Log-normal with the requested mean and coefficient of variation.
          const double sigma = std::sqrt(std::log1p(agent.breathing_cv * agent.breathing_cv));
          interval *= std::exp(state.rng.normal(0.0, sigma) - 0.5 * sigma * sigma);
        }
        agent.next_exhale += std::max(0.2, interval);
      }
    }
  }
  for (const auto& e : state.step_exhalations) state.exhalations.push_back(e);
  const double horizon = 10.0 * state.config.plume_lifetime;
  std::erase_if(state.exhalations, [&](const Exhalation& e) { return state.clock - e.time > horizon; });
  return state;
}

}  // namespace homebot::world
