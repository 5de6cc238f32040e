#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "homebot/detection/breath.hpp"
#include "homebot/detection/presence.hpp"
#include "homebot/planning/tour.hpp"
#include "homebot/sensors/sensors.hpp"

namespace homebot::scenario {

/// Approach/withdraw sessions with a held breath sensor.
struct BreathTrialConfig {
  int participants = 7;
  int cycles = 5;
  double hold = 20.0;      // seconds close
  double withdraw = 20.0;  // seconds away
  double lead_in = 20.0;   // seconds before the first approach
  double close_distance = 0.3;
  double far_distance = 1.2;
  double move_speed = 0.6;     // m/s of the face
  double read_period = 1.0;    // readings are averaged over this period before the detector sees them
  sensors::GasModel gas;
  detection::BreathDetectorConfig detector;
  std::uint64_t seed = 11;
};

struct BreathTrialResult {
  std::vector<double> latencies;  // seconds, one per detected change
  int changes = 0;
  int undetected = 0;             // changes never matched before the run ended
  double max_latency = 0.0;
  [[nodiscard]] double mean_latency() const;
};

/// Latency of a change is the time until the detector first reports the new
/// state. Changes still unmatched at the end of the session are undetected.
BreathTrialResult run_breath_trials(const BreathTrialConfig& cfg);

/// A person breathing beside the robot while it pans its sensor left and
/// right.
struct SideTrialConfig {
  double lateral_offset = 0.3;  // metres to the left (negative: right)
  double forward_offset = 0.1;
  double pan_offset = 0.1;      // sensor displacement to each side, metres
  double dwell = 2.0;           // seconds per pan position
  double duration = 10.0;
  double settle = 10.0;         // seconds of breathing before panning starts
  sensors::GasModel gas;
  detection::FusionConfig fusion;
};

detection::Side run_side_trial(const SideTrialConfig& cfg, std::uint64_t seed);

/// Two photos of faces in front of the robot; the robot must approach the
/// closer (distance trials) or higher (height trials) one.
struct PhotoTrial {
  std::array<double, 2> distance{1.5, 3.0};  // metres ahead of the robot
  std::array<double, 2> height{1.2, 1.2};    // face center height, metres
  double separation = 0.6;                   // lateral metres between the photos
  int expected = 0;                          // index of the correct photo
  bool height_trial = false;
};

/// Ten distance trials (near photo at 2 m or 1.5 m, far photo at 3 m) and
/// ten height trials at 2 m (heights 1.2 +/- 0.15 m or 1.2 +/- 0.075 m).
std::vector<PhotoTrial> photo_trials();

/// Face perception noise: additive height noise; relative width noise is
/// off by default and used only for sensitivity runs.
struct PhotoNoise {
  bool enabled = false;
  double height_sd = 0.05;
  double width_sd = 0.0;
};

/// True when the first node of the planned tour is the expected photo.
/// Ties in reward prefer the higher, then the nearer, measured face.
bool run_photo_trial(const PhotoTrial& trial, const PhotoNoise& noise, std::uint64_t seed,
                     const planning::HelpfulnessParams& params = {});

}  // namespace homebot::scenario
