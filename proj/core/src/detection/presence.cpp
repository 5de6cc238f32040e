#include "homebot/detection/presence.hpp"

#include <algorithm>
#include <set>

namespace homebot::detection {

std::string_view to_string(Side s) {
  switch (s) {
    case Side::Left: return "left";
    case Side::Right: return "right";
    case Side::Center: return "center";
    case Side::Unknown: return "unknown";
  }
  return "unknown";
}

PresenceEstimate fuse_presence(std::span<const BreathTransition> fast, std::span<const ChangePoint> slow,
                               std::span<const PanSample> pan, const FusionConfig& cfg) {
  PresenceEstimate est;
  const bool fast_close = !fast.empty() && fast.back().to == Presence::Close;
  const bool slow_rising = !slow.empty() && slow.back().direction == ChangeDirection::Rising &&
                           cfg.now - slow.back().timestamp <= cfg.hold_window;
  est.present = fast_close || slow_rising;

  std::set<double> bearings;
  for (const auto& p : pan) bearings.insert(p.bearing);
  if (bearings.size() < 2) return est;

  const auto [lo, hi] = std::minmax_element(pan.begin(), pan.end(),
                                            [](const PanSample& a, const PanSample& b) { return a.reading < b.reading; });
  if (hi->reading - lo->reading <= cfg.noise_floor) return est;
  if (hi->bearing > cfg.center_half_width)
    est.side = Side::Left;
  else if (hi->bearing < -cfg.center_half_width)
    est.side = Side::Right;
  else
    est.side = Side::Center;
  return est;
}

}  // namespace homebot::detection
