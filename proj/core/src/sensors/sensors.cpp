#include "homebot/sensors/sensors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "homebot/error.hpp"

namespace homebot::sensors {

using nlohmann::json;
using world::SensorKind;

json to_json(const SensorEvent& e) {
  return json{{"t", e.timestamp}, {"id", e.sensor_id}, {"kind", world::to_string(e.kind)}, {"value", e.value}};
}

SensorEvent sensor_event_from_json(const json& j) {
  try {
    SensorEvent e;
    e.timestamp = j.at("t").get<double>();
    e.sensor_id = j.at("id").get<std::string>();
    e.kind = world::sensor_kind_from_string(j.at("kind").get<std::string>());
    e.value = j.at("value").get<bool>();
    return e;
  } catch (const json::exception& ex) {
    throw ParseError(std::string("sensor event: ") + ex.what());
  }
}

std::string to_json_lines(const std::vector<SensorEvent>& events) {
  std::string out;
  for (const auto& e : events) {
    out += to_json(e).dump();
    out += '\n';
  }
  return out;
}

std::vector<SensorEvent> sensor_events_from_json_lines(std::string_view text) {
  std::vector<SensorEvent> events;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      events.push_back(sensor_event_from_json(json::parse(line)));
    } catch (const std::exception& ex) {
      throw ParseError("line " + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return events;
}

std::vector<SensorEvent> sample_environment_sensors(const world::WorldState& state, const EnvironmentSensorConfig& cfg) {
  std::vector<SensorEvent> events;
  const auto& map = state.map;
  for (const auto& sensor : map.sensors()) {
    switch (sensor.kind) {
      case SensorKind::Pressure: {
        const bool occupied = std::any_of(state.agents.begin(), state.agents.end(), [&](const world::AgentState& a) {
          if (a.away) return false;
          const auto cells = a.footprint(map);
          return std::any_of(cells.begin(), cells.end(), [&](world::Cell c) { return sensor.zone.contains(c); });
        });
        if (occupied) events.push_back({state.clock, sensor.id, sensor.kind, true});
        break;
      }
      case SensorKind::PIR: {
        const bool motion = std::any_of(state.agents.begin(), state.agents.end(), [&](const world::AgentState& a) {
          return !a.away && sensor.zone.contains(map.cell_of(a.position)) &&
                 a.last_step_displacement.norm() >= cfg.motion_epsilon;
        });
        if (motion) events.push_back({state.clock, sensor.id, sensor.kind, true});
        break;
      }
      case SensorKind::Contact:
        for (const auto& c : state.step_contacts)
          if (c.sensor_id == sensor.id) events.push_back({state.clock, sensor.id, sensor.kind, c.open});
        break;
    }
  }
  return events;
}

double gas_target(const world::WorldState& state, const Vec2& position, const GasModel& model) {
  double c = model.baseline;
  const double two_sigma_sq = 2.0 * model.plume_sigma * model.plume_sigma;
  for (const auto& puff : state.exhalations) {
    const double age = state.clock - puff.time;
    if (age < 0.0) continue;
    const double d2 = (puff.position - position).squaredNorm();
    c += model.puff_amplitude * std::exp(-d2 / two_sigma_sq) * std::exp(-age / model.puff_lifetime);
  }
  for (const auto& src : state.gas_field_sources) {
    const double d2 = (src.position - position).squaredNorm();
    c += src.emission_rate * std::exp(-d2 / two_sigma_sq);
  }
  return c;
}

GasSample GasSensor::update(double timestamp, double target, double dt, Rng* rng) {
  const double tau = target > level_ ? model_.rise_time_constant : model_.decay_time_constant;
  level_ += (target - level_) * (1.0 - std::exp(-dt / tau));
  double reading = level_;
  if (rng && model_.noise_stddev > 0.0) reading += rng->normal(0.0, model_.noise_stddev);
  return {timestamp, std::max(model_.baseline_floor, reading)};
}

GasSample GasSensor::sample(const world::WorldState& state, const Vec2& sensor_position, double dt, Rng* rng) {
  return update(state.clock, gas_target(state, sensor_position, model_), dt, rng);
}

bool line_of_sight(const world::HomeMap& map, const Vec2& a, const Vec2& b) {
  const double len = (b - a).norm();
  const double step = 0.25 * map.cell_size();
  const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
  const world::Cell target = map.cell_of(b);
  for (int i = 1; i < n; ++i) {
    const Vec2 p = a + (b - a) * (static_cast<double>(i) / n);
    const world::Cell c = map.cell_of(p);
    if (c == target) break;
    if (!map.is_free(c)) return false;
  }
  return true;
}

namespace {

double noisy(double v, double sd, Rng* rng) { return (rng && sd > 0.0) ? v + rng->normal(0.0, sd) : v; }

double wrap_angle(double a) {
  while (a > std::numbers::pi) a -= 2.0 * std::numbers::pi;
  while (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

}  // namespace

std::vector<ScanCluster> sample_laser_clusters(const world::WorldState& state, const RobotPose& pose,
                                               const LaserConfig& cfg, Rng* rng) {
  std::vector<ScanCluster> clusters;
  auto visible = [&](const Vec2& p) {
    return (p - pose.position).norm() <= cfg.max_range && line_of_sight(state.map, pose.position, p);
  };
  auto finish = [&](ScanCluster c) {
    c.major_extent = std::max(0.01, noisy(c.major_extent, cfg.extent_noise, rng));
    c.minor_extent = std::max(0.01, noisy(c.minor_extent, cfg.extent_noise, rng));
    if (c.minor_extent > c.major_extent) std::swap(c.minor_extent, c.major_extent);
    clusters.push_back(std::move(c));
  };
  const double fore = cfg.foreshortening_angle_deg * std::numbers::pi / 180.0;
  for (const auto& a : state.agents) {
    if (a.away || !visible(a.position)) continue;
    ScanCluster c;
    c.centroid = a.position;
    c.source = a.id;
    c.in_known_map = false;
    if (a.fallen) {
      const Vec2 axis = world::fall_vector(a.heading, a.fall_direction);
      const Vec2 ray = (a.position - pose.position).normalized();
      // Angle between two undirected lines, in [0, pi/2].
      const double cosang = std::min(1.0, std::abs(ray.dot(axis)));
      const double angle = std::acos(cosang);
      if (angle < fore) {
        c.major_extent = a.body_width;
        c.minor_extent = 0.6 * a.body_width;
      } else {
        c.major_extent = std::max(a.lying_extent(), a.body_width);
        c.minor_extent = a.body_width;
      }
    } else {
      c.major_extent = a.shoulder_width;
      c.minor_extent = 0.25;
    }
    c.mean_temperature = noisy(a.skin_temperature, cfg.temperature_noise, rng);
    finish(std::move(c));
  }
  for (const auto& p : state.props) {
    if (!visible(p.position)) continue;
    ScanCluster c;
    c.centroid = p.position;
    c.source = p.name;
    c.major_extent = p.extent;
    c.minor_extent = 0.8 * p.extent;
    c.mean_temperature = noisy(p.temperature(state.clock), cfg.temperature_noise, rng);
    finish(std::move(c));
  }
  return clusters;
}

double face_miss_probability(double distance, const FaceConfig& cfg) {
  if (distance <= cfg.miss_free_range) return 0.0;
  return std::clamp((distance - cfg.miss_free_range) * cfg.miss_slope, 0.0, 1.0);
}

std::vector<PerceivedFace> perceive_faces(const world::WorldState& state, const RobotPose& pose, const FaceConfig& cfg,
                                          Rng* rng) {
  if (!(cfg.fov > 0.0 && cfg.fov <= std::numbers::pi)) throw InvalidArgument("perceive_faces: fov must be in (0, pi]");
  if (!(cfg.max_range > 0.0)) throw InvalidArgument("perceive_faces: max_range must be positive");
  std::vector<PerceivedFace> faces;
  for (const auto& a : state.agents) {
    if (a.away || a.fallen) continue;
    const Vec2 rel = a.face_position() - pose.position;
    const double distance = rel.norm();
    if (distance <= 1e-9 || distance > cfg.max_range) continue;
    const double bearing = wrap_angle(std::atan2(rel.y(), rel.x()) - pose.heading);
    if (std::abs(bearing) > 0.5 * cfg.fov) continue;
    if (cfg.line_of_sight && !line_of_sight(state.map, pose.position, a.face_position())) continue;
    if (rng) {
      // Always draw so the stream advances identically whatever the outcome.
      const double u = rng->uniform();
      if (u < face_miss_probability(distance, cfg)) continue;
    }
    PerceivedFace f;
    f.agent_id = a.id;
    f.apparent_width = a.face_width / distance;
    if (rng && cfg.width_noise > 0.0)
      f.apparent_width *= std::max(0.05, 1.0 + rng->normal(0.0, cfg.width_noise));
    f.face_center_height = noisy(a.face_height(), cfg.height_noise, rng);
    f.bearing = bearing;
    faces.push_back(std::move(f));
  }
  return faces;
}

}  // namespace homebot::sensors
