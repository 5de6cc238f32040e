#pragma once

#include <vector>

#include "homebot/sensors/sensors.hpp"

namespace homebot::detection {

struct FallenCandidate {
  world::Vec2 position = world::Vec2::Zero();
  double confidence = 0.0;
  bool size_ok = false;
  bool temperature_ok = false;
};

struct FallenThresholds {
  double size_min = 0.4;  // metres
  double size_max = 2.1;
  double temp_min = 30.0;  // degrees C
  double temp_max = 40.0;
};

/// The raw threshold predicate: unknown object, human-sized, human-warm.
bool is_fallen_person(const sensors::ScanCluster& c, const FallenThresholds& t);

/// Candidates are clusters absent from the known map whose major extent and
/// temperature both lie inside the closed threshold intervals. Confidence is
/// the product of the two normalized distances to the nearest interval
/// bound (1 at the interval center, 0 on a bound).
std::vector<FallenCandidate> detect_fallen(const std::vector<sensors::ScanCluster>& clusters,
                                           const FallenThresholds& t = {});

enum class FallVerdict { NoFall, Forward, Backward, Left, Right };
std::string_view to_string(FallVerdict v);

struct ShoulderSample {
  double t = 0.0;
  double height = 0.0;               // metres
  world::Vec2 displacement = world::Vec2::Zero();  // cumulative, person frame: +x forward, +y left
};

struct FallConfig {
  double drop_threshold = 0.5;  // metres
  double window = 2.0;          // seconds
};

/// NoFall unless the shoulder drops by at least drop_threshold within the
/// window. The direction is the quadrant of the net horizontal displacement;
/// each quadrant includes its counter-clockwise boundary, so exactly 45
/// degrees is Forward. Throws InvalidArgument for fewer than 2 samples.
FallVerdict fall_direction(const std::vector<ShoulderSample>& track, const FallConfig& cfg = {});

}  // namespace homebot::detection
