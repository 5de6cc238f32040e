#include "homebot/detection/fallen.hpp"

#include <algorithm>

#include "homebot/error.hpp"

namespace homebot::detection {

bool is_fallen_person(const sensors::ScanCluster& c, const FallenThresholds& t) {
  return !c.in_known_map && c.major_extent >= t.size_min && c.major_extent <= t.size_max &&
         c.mean_temperature >= t.temp_min && c.mean_temperature <= t.temp_max;
}

namespace {
double interval_margin(double v, double lo, double hi) {
  const double half = 0.5 * (hi - lo);
  if (half <= 0.0) return v == lo ? 1.0 : 0.0;
  return std::clamp(std::min(v - lo, hi - v) / half, 0.0, 1.0);
}
}  // namespace

std::vector<FallenCandidate> detect_fallen(const std::vector<sensors::ScanCluster>& clusters,
                                           const FallenThresholds& t) {
  std::vector<FallenCandidate> out;
  for (const auto& c : clusters) {
    if (!is_fallen_person(c, t)) continue;
    FallenCandidate cand;
    cand.position = c.centroid;
    cand.size_ok = true;
    cand.temperature_ok = true;
    cand.confidence = interval_margin(c.major_extent, t.size_min, t.size_max) *
                      interval_margin(c.mean_temperature, t.temp_min, t.temp_max);
    out.push_back(cand);
  }
  return out;
}

std::string_view to_string(FallVerdict v) {
  switch (v) {
    case FallVerdict::NoFall: return "no_fall";
    case FallVerdict::Forward: return "forward";
    case FallVerdict::Backward: return "backward";
    case FallVerdict::Left: return "left";
    case FallVerdict::Right: return "right";
  }
  return "no_fall";
}

FallVerdict fall_direction(const std::vector<ShoulderSample>& track, const FallConfig& cfg) {
  if (track.size() < 2) throw InvalidArgument("fall_direction: track needs at least two samples");
  bool fell = false;
  for (std::size_t i = 0; i < track.size() && !fell; ++i)
    for (std::size_t j = i + 1; j < track.size() && track[j].t - track[i].t <= cfg.window; ++j)
      if (track[i].height - track[j].height >= cfg.drop_threshold) {
        fell = true;
        break;
      }
  if (!fell) return FallVerdict::NoFall;

  const world::Vec2 d = track.back().displacement - track.front().displacement;
  const double x = d.x(), y = d.y();
  // Quadrants (-45,45], (45,135], (135,225], (225,315] in degrees, compared
  // without trigonometry so boundaries are exact.
  if (x > 0 && y > -x && y <= x) return FallVerdict::Forward;
  if (y > 0 && y > x && -x <= y) return FallVerdict::Left;
  if (x < 0 && y < -x && y >= x) return FallVerdict::Backward;
  if (y < 0 && y < x && x <= -y) return FallVerdict::Right;
  return FallVerdict::Forward;  // zero displacement
}

}  // namespace homebot::detection
