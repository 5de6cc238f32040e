#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "homebot/rng.hpp"
#include "homebot/triage/triage.hpp"

namespace homebot::triage {

/// Measurement noise applied to fixture percepts. `enabled = false` turns
/// every percept into its ground truth.
struct FixtureNoise {
  bool enabled = true;
  double blueness_sd = 0.15;          // low-resolution hand region
  double pitch_sd_deg = 12.0;         // chin pose from angled faces
  double orientation_confusion = 0.1; // face orientation misread as a neighbour
  double interval_jitter = 0.15;      // relative sd of breath intervals
  double missed_breath = 0.04;        // probability a breath goes undetected
  double region_confusion = 0.1;      // per frame: red region attributed to an adjacent joint
  double area_sd = 2e-4;              // m^2 per observation (2 cm^2)
};

struct CyanosisCase {
  std::string region;  // where the bluing was applied; "none" for clean images
  double true_blueness = 0.0;
  double measured_blueness = 0.0;
  Circulation label = Circulation::Normal;
};

struct AirwayCase {
  double true_pitch_deg = 0.0;
  FaceOrientation true_orientation = FaceOrientation::Front;
  double measured_pitch_deg = 0.0;
  FaceOrientation measured_orientation = FaceOrientation::Front;
  Airway label = Airway::Open;
};

struct BreathingCase {
  std::vector<double> true_intervals;
  std::vector<double> measured_intervals;
  double window = 60.0;
  Breathing label = Breathing::Normal;
};

struct BleedingCase {
  std::vector<RedObservation> track;
  BleedingVerdict label;
  bool rate_case = false;  // part of the 18-sample rate set rather than the 36-sample location set
};

/// 36 images blued in six regions (six each) plus 4 clean images.
std::vector<CyanosisCase> cyanosis_fixture(Rng& rng, const FixtureNoise& noise);
/// Chin up/down crossed with front/side/down orientation, 40 samples.
std::vector<AirwayCase> airway_fixture(Rng& rng, const FixtureNoise& noise);
/// 10 regular and 30 abnormal (fast, slow, agonal) recordings.
std::vector<BreathingCase> breathing_fixture(Rng& rng, const FixtureNoise& noise);
/// 36 location cases (six per region) and 18 rate cases (massive/slight/none).
std::vector<BleedingCase> bleeding_fixture(Rng& rng, const FixtureNoise& noise);

struct FixtureAccuracy {
  double cyanosis = 0.0;
  double airway = 0.0;
  double breathing = 0.0;
  double bleeding_location = 0.0;
  double bleeding_rate = 0.0;
  /// Mean of the five accuracies.
  [[nodiscard]] double overall() const {
    return (cyanosis + airway + breathing + bleeding_location + bleeding_rate) / 5.0;
  }
};

FixtureAccuracy evaluate_fixtures(std::uint64_t seed, const FixtureNoise& noise,
                                  const TriageThresholds& thresholds = {});

/// Ground-truth skeleton of a lying person and the face-derived frame the
/// robot would estimate for it.
struct PoseCase {
  BodyFrame estimated_frame;
  std::vector<BodyPartEstimate> truth;
};

/// Five lying poses with per-person anthropometric variation and face
/// localization noise.
std::vector<PoseCase> pose_fixture(Rng& rng, const FixtureNoise& noise);
/// Mean Euclidean error of locate_parts over all parts of all poses.
double mean_part_error(const std::vector<PoseCase>& poses, const BodyPrior& prior = {});

/// CSV exports with ground-truth labels.
std::string cyanosis_csv(const std::vector<CyanosisCase>& cases);
std::string airway_csv(const std::vector<AirwayCase>& cases);
std::string breathing_csv(const std::vector<BreathingCase>& cases);
std::string bleeding_csv(const std::vector<BleedingCase>& cases);

}  // namespace homebot::triage
