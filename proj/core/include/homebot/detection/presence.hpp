#pragma once

#include <span>
#include <vector>

#include "homebot/detection/breath.hpp"
#include "homebot/detection/trend.hpp"

namespace homebot::detection {

enum class Side { Left, Right, Center, Unknown };
std::string_view to_string(Side s);

struct PanSample {
  double bearing = 0.0;  // radians, positive to the left
  double reading = 0.0;
};

struct PresenceEstimate {
  bool present = false;
  Side side = Side::Unknown;
};

struct FusionConfig {
  double now = 0.0;
  double hold_window = 30.0;        // seconds a rising change point keeps presence asserted
  double noise_floor = 1.5;         // sensor units; smaller pan spreads give Side::Unknown
  double center_half_width = 0.26;  // radians (~15 degrees)
};

/// Combines the fast threshold machine with the slow trend model:
/// present when the fast machine's latest state is Close or the latest
/// slow change point is Rising and within the hold window. The side is the
/// bearing bucket of the strongest pan reading.
PresenceEstimate fuse_presence(std::span<const BreathTransition> fast, std::span<const ChangePoint> slow,
                               std::span<const PanSample> pan, const FusionConfig& cfg);

}  // namespace homebot::detection
