#include "homebot/triage/triage.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <nlohmann/json.hpp>

#include "homebot/error.hpp"

namespace homebot::triage {

std::string_view to_string(BodyPart p) {
  switch (p) {
    case BodyPart::Chest: return "chest";
    case BodyPart::LeftHand: return "left_hand";
    case BodyPart::RightHand: return "right_hand";
    case BodyPart::Chin: return "chin";
    case BodyPart::Mouth: return "mouth";
    case BodyPart::Nose: return "nose";
  }
  return "chest";
}

std::vector<BodyPartEstimate> locate_parts(const BodyFrame& frame, const BodyPrior& prior) {
  if (!(frame.scale > 0.0)) throw InvalidArgument("locate_parts: scale must be positive");
  if (frame.body_axis.norm() < 1e-12) throw InvalidArgument("locate_parts: degenerate body axis");
  const Vec2 axis = frame.body_axis.normalized();
  Vec2 left(-axis.y(), axis.x());
  if (!frame.face_up) left = -left;
  const double s = frame.scale;
  auto at = [&](double along, double side) -> Vec2 { return frame.face_center + s * (along * axis + side * left); };
  // Uncertainty grows with distance from the face, where the prior is weakest.
  auto unc = [&](double along) { return 0.1 * s * (1.0 + std::abs(along)); };
  return {
      {BodyPart::Chest, at(prior.chest, 0.0), unc(prior.chest)},
      {BodyPart::LeftHand, at(prior.hands_axial, prior.hands_lateral), unc(prior.hands_axial)},
      {BodyPart::RightHand, at(prior.hands_axial, -prior.hands_lateral), unc(prior.hands_axial)},
      {BodyPart::Chin, at(prior.chin, 0.0), unc(prior.chin)},
      {BodyPart::Mouth, at(prior.mouth, 0.0), unc(prior.mouth)},
      {BodyPart::Nose, at(prior.nose, 0.0), unc(prior.nose)},
  };
}

std::string_view to_string(Circulation v) { return v == Circulation::Normal ? "normal" : "cyanotic"; }
std::string_view to_string(Airway v) { return v == Airway::Open ? "open" : "obstructed_risk"; }

std::string_view to_string(Breathing v) {
  switch (v) {
    case Breathing::Normal: return "normal";
    case Breathing::Fast: return "fast";
    case Breathing::Slow: return "slow";
    case Breathing::Agonal: return "agonal";
    case Breathing::Absent: return "absent";
  }
  return "normal";
}

std::string_view to_string(BleedLocation v) {
  switch (v) {
    case BleedLocation::None: return "none";
    case BleedLocation::Head: return "head";
    case BleedLocation::Body: return "body";
    case BleedLocation::LeftArm: return "left_arm";
    case BleedLocation::RightArm: return "right_arm";
    case BleedLocation::LeftLeg: return "left_leg";
    case BleedLocation::RightLeg: return "right_leg";
  }
  return "none";
}

std::string_view to_string(BleedSeverity v) {
  switch (v) {
    case BleedSeverity::None: return "none";
    case BleedSeverity::Slight: return "slight";
    case BleedSeverity::Massive: return "massive";
  }
  return "none";
}

std::string_view to_string(FaceOrientation v) {
  switch (v) {
    case FaceOrientation::Front: return "front";
    case FaceOrientation::Side: return "side";
    case FaceOrientation::Down: return "down";
  }
  return "front";
}

std::string_view to_string(Priority v) {
  switch (v) {
    case Priority::Green: return "green";
    case Priority::Yellow: return "yellow";
    case Priority::Red: return "red";
  }
  return "green";
}

BleedLocation bleed_location_from_string(std::string_view s) {
  for (auto v : {BleedLocation::None, BleedLocation::Head, BleedLocation::Body, BleedLocation::LeftArm,
                 BleedLocation::RightArm, BleedLocation::LeftLeg, BleedLocation::RightLeg})
    if (to_string(v) == s) return v;
  throw ParseError("unknown bleeding location '" + std::string(s) + "'");
}

FaceOrientation face_orientation_from_string(std::string_view s) {
  for (auto v : {FaceOrientation::Front, FaceOrientation::Side, FaceOrientation::Down})
    if (to_string(v) == s) return v;
  throw ParseError("unknown face orientation '" + std::string(s) + "'");
}

Circulation assess_cyanosis(double blueness, const TriageThresholds& t) {
  if (!(blueness >= 0.0 && blueness <= 1.0)) throw InvalidArgument("assess_cyanosis: blueness must be in [0, 1]");
  return blueness >= t.blueness ? Circulation::Cyanotic : Circulation::Normal;
}

Airway assess_airway(double chin_pitch_deg, FaceOrientation orientation, const TriageThresholds& t) {
  if (!(chin_pitch_deg >= -90.0 && chin_pitch_deg <= 90.0)) throw InvalidArgument("assess_airway: pitch must be in [-90, 90]");
  return chin_pitch_deg >= t.pitch_open_deg && orientation != FaceOrientation::Down ? Airway::Open
                                                                                     : Airway::ObstructedRisk;
}

double coefficient_of_variation(const std::vector<double>& intervals) {
  if (intervals.size() < 2) return 0.0;
  const double n = static_cast<double>(intervals.size());
  const double mean = std::accumulate(intervals.begin(), intervals.end(), 0.0) / n;
  if (mean <= 0.0) return 0.0;
  double var = 0.0;
  for (double v : intervals) var += (v - mean) * (v - mean);
  return std::sqrt(var / (n - 1.0)) / mean;
}

Breathing assess_breathing(const std::vector<double>& intervals, double regularity_cv, double window_seconds,
                           const TriageThresholds& t) {
  if (window_seconds < t.min_window) throw InvalidArgument("assess_breathing: observation window too short");
  if (intervals.empty()) return Breathing::Absent;
  const double mean = std::accumulate(intervals.begin(), intervals.end(), 0.0) / static_cast<double>(intervals.size());
  if (!(mean > 0.0)) return Breathing::Absent;
  const double rate = 60.0 / mean;
  if (regularity_cv > t.agonal_cv && rate < t.slow_rate) return Breathing::Agonal;
  if (rate > t.fast_rate) return Breathing::Fast;
  if (rate < t.slow_rate) return Breathing::Slow;
  return Breathing::Normal;
}

BleedingVerdict assess_bleeding(const std::vector<RedObservation>& track, const TriageThresholds& t) {
  if (track.empty()) throw InvalidArgument("assess_bleeding: empty track");
  // Per region: final area and least squares growth rate.
  std::map<BleedLocation, std::vector<const RedObservation*>> by_region;
  for (const auto& o : track)
    if (o.region != BleedLocation::None) by_region[o.region].push_back(&o);

  // Majority over the track, so a frame misattributed to a neighbouring
  // joint does not move the verdict.
  BleedingVerdict v;
  double best_area = 0.0;
  std::size_t best_count = 0;
  const std::vector<const RedObservation*>* best = nullptr;
  for (const auto& [region, obs] : by_region) {
    const auto last = std::max_element(obs.begin(), obs.end(), [](auto* x, auto* y) { return x->t < y->t; });
    const double area = (*last)->area;
    if (area < t.bleed_area_min) continue;
    if (obs.size() > best_count || (obs.size() == best_count && area > best_area)) {
      best_count = obs.size();
      best_area = area;
      v.location = region;
      best = &obs;
    }
  }
  if (!best) return v;

  const auto& obs = *best;
  double rate = 0.0;
  if (obs.size() >= 2) {
    double mt = 0.0, ma = 0.0;
    for (auto* o : obs) {
      mt += o->t;
      ma += o->area;
    }
    mt /= static_cast<double>(obs.size());
    ma /= static_cast<double>(obs.size());
    double stt = 0.0, sta = 0.0;
    for (auto* o : obs) {
      stt += (o->t - mt) * (o->t - mt);
      sta += (o->t - mt) * (o->area - ma);
    }
    if (stt > 0.0) rate = sta / stt * 1e4;  // m^2/s -> cm^2/s
  }
  if (rate >= t.bleed_rate_hi)
    v.severity = BleedSeverity::Massive;
  else if (rate > t.bleed_rate_min)
    v.severity = BleedSeverity::Slight;
  return v;
}

Priority triage_priority(Circulation c, Airway a, Breathing b, const BleedingVerdict& bleed) {
  if (b == Breathing::Absent || b == Breathing::Agonal || bleed.severity == BleedSeverity::Massive ||
      (c == Circulation::Cyanotic && a == Airway::ObstructedRisk))
    return Priority::Red;
  if (c != Circulation::Normal || a != Airway::Open || b != Breathing::Normal || bleed.severity != BleedSeverity::None)
    return Priority::Yellow;
  return Priority::Green;
}

VitalsReport triage_report(Circulation c, Airway a, Breathing b, const BleedingVerdict& bleed) {
  return {c, a, b, bleed, triage_priority(c, a, b, bleed)};
}

nlohmann::json to_json(const VitalsReport& r) {
  return {{"circulation", to_string(r.circulation)},
          {"airway", to_string(r.airway)},
          {"breathing", to_string(r.breathing)},
          {"bleeding", {{"location", to_string(r.bleeding.location)}, {"severity", to_string(r.bleeding.severity)}}},
          {"priority", to_string(r.priority)}};
}

}  // namespace homebot::triage
