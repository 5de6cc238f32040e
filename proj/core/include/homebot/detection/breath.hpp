#pragma once

#include <deque>
#include <optional>
#include <utility>

#include "homebot/sensors/sensors.hpp"

namespace homebot::detection {

enum class Presence { Far, Close };

std::string_view to_string(Presence p);

/// Two-state presence belief with an upper and a lower threshold kept
/// around the current reading. Invariant: lower < last_reading < upper.
struct BreathDetectorState {
  Presence presence = Presence::Far;
  double upper = 0.0;
  double lower = 0.0;
  double margin = 1.0;
  double last_reading = 0.0;

  /// Far state with thresholds sandwiching `reading`.
  static BreathDetectorState initial(double reading, double margin, Presence presence = Presence::Far);
};

struct BreathTransition {
  double timestamp = 0.0;
  Presence to = Presence::Far;
};

/// One step of the adaptive dual-threshold machine.
///
/// Readings moving in the direction the current state predicts (rising
/// while Close, falling while Far) re-sandwich the thresholds at
/// reading +/- margin. Otherwise a reading at or beyond a threshold flips
/// the state (at most one transition per sample) and re-sandwiches.
std::pair<BreathDetectorState, std::optional<BreathTransition>> breath_step(const BreathDetectorState& s,
                                                                            const sensors::GasSample& sample);

struct BreathDetectorConfig {
  double margin_sigmas = 3.0;     // margin = margin_sigmas x noise estimate
  double noise_window = 30.0;     // seconds of trailing readings used for the estimate
  double min_margin = 1e-6;
  double initial_margin = 1.5;    // used until the window holds enough samples
  std::size_t min_samples = 10;
};

/// Wraps breath_step with a margin re-estimated from the trailing window.
/// The noise estimate is the scaled median absolute deviation of first
/// differences, which is insensitive to slow drift and to isolated puffs.
class BreathDetector {
 public:
  explicit BreathDetector(BreathDetectorConfig cfg = {}) : cfg_(cfg) {}

  std::optional<BreathTransition> update(const sensors::GasSample& sample);

  [[nodiscard]] bool initialized() const { return initialized_; }
  [[nodiscard]] BreathDetectorState const& state() const { return state_; }
  [[nodiscard]] double noise_estimate() const;

 private:
  BreathDetectorConfig cfg_;
  BreathDetectorState state_;
  bool initialized_ = false;
  std::deque<sensors::GasSample> window_;
};

}  // namespace homebot::detection
