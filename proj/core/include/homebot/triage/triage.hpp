#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "homebot/world/map.hpp"

namespace homebot::triage {

using world::Vec2;

struct BodyFrame {
  Vec2 face_center = Vec2::Zero();
  Vec2 body_axis = Vec2::UnitX();  // unit vector from the face toward the feet
  double scale = 0.24;             // head length, metres
  bool face_up = true;             // supine; prone mirrors left and right
  double confidence = 1.0;
};

enum class BodyPart { Chest, LeftHand, RightHand, Chin, Mouth, Nose };
std::string_view to_string(BodyPart p);

struct BodyPartEstimate {
  BodyPart part = BodyPart::Chest;
  Vec2 position = Vec2::Zero();
  double uncertainty = 0.0;  // metres
};

/// Offsets along the body axis and to the side, in head lengths.
struct BodyPrior {
  double chin = 0.5;
  double mouth = 0.35;
  double nose = 0.25;
  double chest = 2.0;
  double hands_axial = 3.0;
  double hands_lateral = 1.0;
};

/// Places the six parts of interest at fixed multiples of the head length
/// from the face center. Throws InvalidArgument for a zero axis or
/// non-positive scale.
std::vector<BodyPartEstimate> locate_parts(const BodyFrame& frame, const BodyPrior& prior = {});

enum class Circulation { Normal, Cyanotic };
enum class Airway { Open, ObstructedRisk };
enum class Breathing { Normal, Fast, Slow, Agonal, Absent };
enum class BleedLocation { None, Head, Body, LeftArm, RightArm, LeftLeg, RightLeg };
enum class BleedSeverity { None, Slight, Massive };
enum class FaceOrientation { Front, Side, Down };
enum class Priority { Green, Yellow, Red };

std::string_view to_string(Circulation v);
std::string_view to_string(Airway v);
std::string_view to_string(Breathing v);
std::string_view to_string(BleedLocation v);
std::string_view to_string(BleedSeverity v);
std::string_view to_string(FaceOrientation v);
std::string_view to_string(Priority v);
BleedLocation bleed_location_from_string(std::string_view s);
FaceOrientation face_orientation_from_string(std::string_view s);

struct BleedingVerdict {
  BleedLocation location = BleedLocation::None;
  BleedSeverity severity = BleedSeverity::None;
  friend bool operator==(const BleedingVerdict&, const BleedingVerdict&) = default;
};

struct TriageThresholds {
  double blueness = 0.3;
  double pitch_open_deg = 10.0;
  double fast_rate = 25.0;  // breaths per minute
  double slow_rate = 8.0;
  double agonal_cv = 0.6;
  double min_window = 15.0;  // seconds of observation
  double bleed_area_min = 1e-4;  // m^2 (1 cm^2)
  double bleed_rate_hi = 5.0;    // cm^2/s
  double bleed_rate_min = 0.5;   // cm^2/s; slower growth is treated as none
};

/// Cyanotic iff the distal-hand blueness ratio reaches the threshold.
Circulation assess_cyanosis(double blueness, const TriageThresholds& t = {});

/// Open iff chin pitch reaches pitch_open and the face is not turned down.
Airway assess_airway(double chin_pitch_deg, FaceOrientation orientation, const TriageThresholds& t = {});

/// Absent without breaths; otherwise rate = 60 / mean interval; Agonal when
/// the coefficient of variation exceeds agonal_cv at a slow rate, then
/// Fast / Slow by rate, else Normal. Throws InvalidArgument when the
/// observation window is shorter than min_window.
Breathing assess_breathing(const std::vector<double>& intervals, double regularity_cv, double window_seconds,
                           const TriageThresholds& t = {});

/// Coefficient of variation of a list of intervals (0 for fewer than 2).
double coefficient_of_variation(const std::vector<double>& intervals);

struct RedObservation {
  double t = 0.0;
  BleedLocation region = BleedLocation::None;
  double area = 0.0;  // m^2
};

/// Location is the region seen in most frames (ties go to the larger final
/// area, regions below bleed_area_min are ignored); severity comes from
/// that region's growth rate (least squares slope, cm^2/s). Throws
/// InvalidArgument for an empty track.
BleedingVerdict assess_bleeding(const std::vector<RedObservation>& track, const TriageThresholds& t = {});

struct VitalsReport {
  Circulation circulation = Circulation::Normal;
  Airway airway = Airway::Open;
  Breathing breathing = Breathing::Normal;
  BleedingVerdict bleeding;
  Priority priority = Priority::Green;
};

/// Red: breathing absent or agonal, massive bleeding, or cyanosis together
/// with an airway at risk. Yellow: any other abnormal finding. Else Green.
Priority triage_priority(Circulation c, Airway a, Breathing b, const BleedingVerdict& bleed);
VitalsReport triage_report(Circulation c, Airway a, Breathing b, const BleedingVerdict& bleed);

nlohmann::json to_json(const VitalsReport& r);

}  // namespace homebot::triage
