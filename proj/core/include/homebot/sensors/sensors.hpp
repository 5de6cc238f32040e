#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "homebot/rng.hpp"
#include "homebot/world/world.hpp"

namespace homebot::sensors {

using world::Vec2;

/// One environmental sensor reading, the record format of the central
/// sensor database. `value` is occupied (pressure), open (contact) or
/// motion (PIR).
struct SensorEvent {
  double timestamp = 0.0;
  std::string sensor_id;
  world::SensorKind kind = world::SensorKind::Pressure;
  bool value = false;
  friend bool operator==(const SensorEvent&, const SensorEvent&) = default;
};

/// `{"t":..., "id":..., "kind":..., "value":...}`
nlohmann::json to_json(const SensorEvent& e);
SensorEvent sensor_event_from_json(const nlohmann::json& j);
/// Serializes one event per line.
std::string to_json_lines(const std::vector<SensorEvent>& events);
std::vector<SensorEvent> sensor_events_from_json_lines(std::string_view text);

struct EnvironmentSensorConfig {
  double motion_epsilon = 0.01;  // metres moved within one step to trigger a PIR
};

/// Pressure fires while an agent stands or lies on the mat cell; PIR fires
/// when an agent moved at least motion_epsilon inside its zone during the
/// last step; contact fires on scripted open/close actions.
std::vector<SensorEvent> sample_environment_sensors(const world::WorldState& state,
                                                    const EnvironmentSensorConfig& cfg = {});

struct GasSample {
  double timestamp = 0.0;
  double reading = 0.0;
};

struct GasModel {
  double baseline = 100.0;
  double baseline_floor = 0.0;
  double puff_amplitude = 50.0;  // A: peak contribution of one exhalation at zero distance
  double plume_sigma = 0.2;      // spatial spread, metres
  double puff_lifetime = 3.0;    // exponential lifetime of one puff, seconds
  double rise_time_constant = 2.0;
  double decay_time_constant = 60.0;
  double noise_stddev = 0.5;     // 1% of the puff amplitude
};

/// Target concentration at a point: baseline plus the Gaussian puffs of
/// recent exhalations, each decaying with the puff lifetime, plus any
/// constant gas sources.
double gas_target(const world::WorldState& state, const Vec2& position, const GasModel& model);

/// Metal-oxide gas sensor with asymmetric first-order response: fast rise,
/// slow reversion. Holds the lagged reading between samples.
class GasSensor {
 public:
  explicit GasSensor(GasModel model = {}) : model_(model), level_(model.baseline) {}

  /// Relaxes the internal level toward `target` over `dt` and returns a
  /// noisy reading. Pass `rng == nullptr` for a noise-free reading.
  GasSample update(double timestamp, double target, double dt, Rng* rng);

  /// sample_gas: target from the world's plume at `sensor_position`.
  GasSample sample(const world::WorldState& state, const Vec2& sensor_position, double dt, Rng* rng);

  [[nodiscard]] double level() const { return level_; }
  [[nodiscard]] GasModel const& model() const { return model_; }

 private:
  GasModel model_;
  double level_;
};

struct ScanCluster {
  Vec2 centroid = Vec2::Zero();
  double major_extent = 0.0;
  double minor_extent = 0.0;
  double mean_temperature = 0.0;
  bool in_known_map = false;
  std::string source;  // agent or prop name; ground truth, not used by detectors
};

struct RobotPose {
  Vec2 position = Vec2::Zero();
  double heading = 0.0;
};

struct LaserConfig {
  double max_range = 5.0;
  double extent_noise = 0.03;       // metres
  double temperature_noise = 0.5;   // degrees C
  double foreshortening_angle_deg = 30.0;
};

/// One cluster per visible agent or prop. Standing agents show their
/// shoulder width; fallen agents show their body length unless the viewing
/// ray lies within the foreshortening angle of the body axis, in which case
/// only the body width is visible.
std::vector<ScanCluster> sample_laser_clusters(const world::WorldState& state, const RobotPose& pose,
                                               const LaserConfig& cfg, Rng* rng);

struct PerceivedFace {
  std::string agent_id;
  double apparent_width = 0.0;  // radians
  double face_center_height = 0.0;
  double bearing = 0.0;  // radians, positive to the left of the robot heading
};

struct FaceConfig {
  double fov = 1.2;           // radians
  double max_range = 6.0;     // metres
  double height_noise = 0.0;  // metres, additive
  double width_noise = 0.0;   // relative sd of the apparent width
  double miss_free_range = 2.0;  // no misses at or below this distance
  double miss_slope = 0.1;       // miss probability per metre beyond miss_free_range
  bool line_of_sight = true;
};

/// Faces of standing agents within the field of view and range. Apparent
/// width is face_width / distance.
std::vector<PerceivedFace> perceive_faces(const world::WorldState& state, const RobotPose& pose,
                                          const FaceConfig& cfg, Rng* rng);

/// Probability that a face at `distance` is not detected.
double face_miss_probability(double distance, const FaceConfig& cfg);

/// Grid line-of-sight between two points (walls block).
bool line_of_sight(const world::HomeMap& map, const Vec2& a, const Vec2& b);

}  // namespace homebot::sensors
