#include "homebot/triage/fixtures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace homebot::triage {

namespace {

constexpr std::array<BleedLocation, 6> kRegions{BleedLocation::Head,    BleedLocation::Body,
                                                BleedLocation::LeftArm, BleedLocation::RightArm,
                                                BleedLocation::LeftLeg, BleedLocation::RightLeg};

// Regions sharing a joint with each region, in kRegions order.
BleedLocation adjacent(BleedLocation r, Rng& rng) {
  switch (r) {
    case BleedLocation::Head: return BleedLocation::Body;
    case BleedLocation::Body: return kRegions[static_cast<std::size_t>(rng.uniform_int(2, 5))];
    case BleedLocation::LeftArm:
    case BleedLocation::RightArm:
    case BleedLocation::LeftLeg:
    case BleedLocation::RightLeg: return BleedLocation::Body;
    case BleedLocation::None: return BleedLocation::None;
  }
  return r;
}

FaceOrientation confuse(FaceOrientation o, Rng& rng) {
  switch (o) {
    case FaceOrientation::Front: return FaceOrientation::Side;
    case FaceOrientation::Down: return FaceOrientation::Side;
    case FaceOrientation::Side: return rng.bernoulli(0.5) ? FaceOrientation::Front : FaceOrientation::Down;
  }
  return o;
}

}  // namespace

std::vector<CyanosisCase> cyanosis_fixture(Rng& rng, const FixtureNoise& noise) {
  static const std::array<const char*, 6> kHandRegions{"left_fingertips", "right_fingertips", "left_nailbed",
                                                       "right_nailbed",   "left_palm_edge",   "right_palm_edge"};
  std::vector<CyanosisCase> cases;
  for (const char* region : kHandRegions)
    for (int i = 0; i < 6; ++i) cases.push_back({region, rng.uniform(0.35, 0.7), 0.0, Circulation::Cyanotic});
  for (int i = 0; i < 4; ++i) cases.push_back({"none", rng.uniform(0.0, 0.15), 0.0, Circulation::Normal});
  for (auto& c : cases) {
    const double n = rng.normal(0.0, noise.blueness_sd);
    c.measured_blueness = noise.enabled ? std::clamp(c.true_blueness + n, 0.0, 1.0) : c.true_blueness;
  }
  return cases;
}

std::vector<AirwayCase> airway_fixture(Rng& rng, const FixtureNoise& noise) {
  std::vector<AirwayCase> cases;
  const std::array<FaceOrientation, 3> orientations{FaceOrientation::Front, FaceOrientation::Side, FaceOrientation::Down};
  for (int i = 0; i < 40; ++i) {
    AirwayCase c;
    const bool chin_up = i % 2 == 0;
    c.true_pitch_deg = chin_up ? rng.uniform(20.0, 40.0) : rng.uniform(-30.0, 0.0);
    c.true_orientation = orientations[static_cast<std::size_t>((i / 2) % 3)];
    c.label = assess_airway(c.true_pitch_deg, c.true_orientation);
    const double n = rng.normal(0.0, noise.pitch_sd_deg);
    const bool flip = rng.bernoulli(noise.orientation_confusion);
    c.measured_pitch_deg = noise.enabled ? std::clamp(c.true_pitch_deg + n, -90.0, 90.0) : c.true_pitch_deg;
    c.measured_orientation = noise.enabled && flip ? confuse(c.true_orientation, rng) : c.true_orientation;
    cases.push_back(c);
  }
  return cases;
}

std::vector<BreathingCase> breathing_fixture(Rng& rng, const FixtureNoise& noise) {
  std::vector<BreathingCase> cases;
  auto fill = [](double period, double window) {
    std::vector<double> v;
    for (double t = period; t <= window; t += period) v.push_back(period);
    return v;
  };
  for (int i = 0; i < 40; ++i) {
    BreathingCase c;
    if (i < 10) {
      c.label = Breathing::Normal;
      c.true_intervals = fill(rng.uniform(3.0, 5.0), c.window);
    } else if (i < 20) {
      c.label = Breathing::Fast;
      c.true_intervals = fill(rng.uniform(1.5, 2.1), c.window);
    } else if (i < 30) {
      c.label = Breathing::Slow;
      c.true_intervals = fill(rng.uniform(8.8, 12.0), c.window);
    } else {
      // Gasping: short pairs separated by long pauses.
      c.label = Breathing::Agonal;
      const double shortgap = rng.uniform(2.0, 3.0);
      const double longgap = rng.uniform(16.0, 22.0);
      double t = 0.0;
      for (int k = 0; t < c.window; ++k) {
        const double gap = k % 2 == 0 ? longgap : shortgap;
        t += gap;
        if (t <= c.window) c.true_intervals.push_back(gap);
      }
    }
    if (!noise.enabled) {
      c.measured_intervals = c.true_intervals;
    } else {
      double carry = 0.0;
      for (double v : c.true_intervals) {
        carry += std::max(0.2, v * (1.0 + rng.normal(0.0, noise.interval_jitter)));
        if (rng.bernoulli(noise.missed_breath)) continue;  // merged with the next interval
        c.measured_intervals.push_back(carry);
        carry = 0.0;
      }
    }
    cases.push_back(std::move(c));
  }
  return cases;
}

std::vector<BleedingCase> bleeding_fixture(Rng& rng, const FixtureNoise& noise) {
  std::vector<BleedingCase> cases;
  auto track_for = [&](BleedLocation region, double rate_cm2_s, double initial_cm2) {
    std::vector<RedObservation> track;
    for (int k = 0; k <= 10; ++k) {
      const double t = k;
      double area = (initial_cm2 + rate_cm2_s * t) * 1e-4;
      BleedLocation seen = region;
      if (noise.enabled) {
        area = std::max(0.0, area + rng.normal(0.0, noise.area_sd));
        if (region != BleedLocation::None && rng.bernoulli(noise.region_confusion)) seen = adjacent(region, rng);
      }
      track.push_back({t, seen, area});
    }
    return track;
  };
  for (auto region : kRegions)
    for (int i = 0; i < 6; ++i) {
      BleedingCase c;
      const double rate = rng.uniform(1.0, 12.0);
      c.track = track_for(region, rate, rng.uniform(4.0, 20.0));
      c.label = {region, rate >= TriageThresholds{}.bleed_rate_hi ? BleedSeverity::Massive : BleedSeverity::Slight};
      cases.push_back(std::move(c));
    }
  for (int i = 0; i < 18; ++i) {
    BleedingCase c;
    c.rate_case = true;
    const auto region = kRegions[static_cast<std::size_t>(rng.uniform_int(0, 5))];
    if (i < 6) {
      const double rate = rng.uniform(6.0, 12.0);
      c.track = track_for(region, rate, rng.uniform(4.0, 20.0));
      c.label = {region, BleedSeverity::Massive};
    } else if (i < 12) {
      const double rate = rng.uniform(1.0, 4.0);
      c.track = track_for(region, rate, rng.uniform(4.0, 20.0));
      c.label = {region, BleedSeverity::Slight};
    } else {
      c.track = track_for(region, 0.0, 0.0);
      c.label = {BleedLocation::None, BleedSeverity::None};
    }
    cases.push_back(std::move(c));
  }
  return cases;
}

FixtureAccuracy evaluate_fixtures(std::uint64_t seed, const FixtureNoise& noise, const TriageThresholds& th) {
  Rng rng(seed);
  FixtureAccuracy acc;
  {
    const auto cases = cyanosis_fixture(rng, noise);
    int ok = 0;
    for (const auto& c : cases) ok += assess_cyanosis(c.measured_blueness, th) == c.label;
    acc.cyanosis = static_cast<double>(ok) / static_cast<double>(cases.size());
  }
  {
    const auto cases = airway_fixture(rng, noise);
    int ok = 0;
    for (const auto& c : cases) ok += assess_airway(c.measured_pitch_deg, c.measured_orientation, th) == c.label;
    acc.airway = static_cast<double>(ok) / static_cast<double>(cases.size());
  }
  {
    const auto cases = breathing_fixture(rng, noise);
    int ok = 0;
    for (const auto& c : cases) {
      const auto v = assess_breathing(c.measured_intervals, coefficient_of_variation(c.measured_intervals), c.window, th);
      ok += v == c.label;
    }
    acc.breathing = static_cast<double>(ok) / static_cast<double>(cases.size());
  }
  {
    const auto cases = bleeding_fixture(rng, noise);
    int loc_ok = 0, loc_n = 0, rate_ok = 0, rate_n = 0;
    for (const auto& c : cases) {
      const auto v = assess_bleeding(c.track, th);
      if (c.rate_case) {
        ++rate_n;
        rate_ok += v.severity == c.label.severity;
      } else {
        ++loc_n;
        loc_ok += v.location == c.label.location;
      }
    }
    acc.bleeding_location = static_cast<double>(loc_ok) / loc_n;
    acc.bleeding_rate = static_cast<double>(rate_ok) / rate_n;
  }
  return acc;
}

std::vector<PoseCase> pose_fixture(Rng& rng, const FixtureNoise& noise) {
  std::vector<PoseCase> poses;
  const std::array<double, 5> headings{0.0, 0.7, 1.9, 3.1, -2.2};
  for (std::size_t i = 0; i < headings.size(); ++i) {
    const double head = rng.uniform(0.21, 0.26);
    const Vec2 face(rng.uniform(0.5, 2.5), rng.uniform(0.5, 2.5));
    const Vec2 axis(std::cos(headings[i]), std::sin(headings[i]));
    const Vec2 left(-axis.y(), axis.x());
    // Anthropometric variation: hands vary with arm placement, chest with build.
    auto part = [&](BodyPart p, double along, double side) {
      return BodyPartEstimate{p, face + head * (along * axis + side * left), 0.0};
    };
    PoseCase pc;
    pc.truth = {
        part(BodyPart::Chest, 2.0 + rng.uniform(-0.08, 0.08), rng.uniform(-0.05, 0.05)),
        part(BodyPart::LeftHand, 3.0 + rng.uniform(-0.15, 0.15), 1.0 + rng.uniform(-0.15, 0.15)),
        part(BodyPart::RightHand, 3.0 + rng.uniform(-0.15, 0.15), -1.0 + rng.uniform(-0.15, 0.15)),
        part(BodyPart::Chin, 0.5 + rng.uniform(-0.04, 0.04), 0.0),
        part(BodyPart::Mouth, 0.35 + rng.uniform(-0.03, 0.03), 0.0),
        part(BodyPart::Nose, 0.25 + rng.uniform(-0.03, 0.03), 0.0),
    };
    BodyFrame f;
    f.face_center = face;
    f.body_axis = axis;
    f.scale = head;
    if (noise.enabled) {
      f.face_center += Vec2(rng.normal(0.0, 0.01), rng.normal(0.0, 0.01));
      const double da = rng.normal(0.0, 2.0 * std::numbers::pi / 180.0);
      f.body_axis = Vec2(std::cos(headings[i] + da), std::sin(headings[i] + da));
      f.scale = head * (1.0 + rng.normal(0.0, 0.04));
    }
    pc.estimated_frame = f;
    poses.push_back(std::move(pc));
  }
  return poses;
}

double mean_part_error(const std::vector<PoseCase>& poses, const BodyPrior& prior) {
  double sum = 0.0;
  int n = 0;
  for (const auto& p : poses) {
    const auto est = locate_parts(p.estimated_frame, prior);
    for (const auto& truth : p.truth)
      for (const auto& e : est)
        if (e.part == truth.part) {
          sum += (e.position - truth.position).norm();
          ++n;
        }
  }
  return n ? sum / n : 0.0;
}

std::string cyanosis_csv(const std::vector<CyanosisCase>& cases) {
  std::ostringstream out;
  out << "region,true_blueness,measured_blueness,label\n";
  for (const auto& c : cases)
    out << c.region << ',' << c.true_blueness << ',' << c.measured_blueness << ',' << to_string(c.label) << '\n';
  return out.str();
}

std::string airway_csv(const std::vector<AirwayCase>& cases) {
  std::ostringstream out;
  out << "true_pitch_deg,true_orientation,measured_pitch_deg,measured_orientation,label\n";
  for (const auto& c : cases)
    out << c.true_pitch_deg << ',' << to_string(c.true_orientation) << ',' << c.measured_pitch_deg << ','
        << to_string(c.measured_orientation) << ',' << to_string(c.label) << '\n';
  return out.str();
}

std::string breathing_csv(const std::vector<BreathingCase>& cases) {
  std::ostringstream out;
  out << "window,measured_intervals,label\n";
  for (const auto& c : cases) {
    out << c.window << ',';
    for (std::size_t i = 0; i < c.measured_intervals.size(); ++i) out << (i ? ";" : "") << c.measured_intervals[i];
    out << ',' << to_string(c.label) << '\n';
  }
  return out.str();
}

std::string bleeding_csv(const std::vector<BleedingCase>& cases) {
  std::ostringstream out;
  out << "case,set,t,region,area_m2,label_location,label_severity\n";
  for (std::size_t i = 0; i < cases.size(); ++i)
    for (const auto& o : cases[i].track)
      out << i << ',' << (cases[i].rate_case ? "rate" : "location") << ',' << o.t << ',' << to_string(o.region) << ','
          << o.area << ',' << to_string(cases[i].label.location) << ',' << to_string(cases[i].label.severity) << '\n';
  return out.str();
}

}  // namespace homebot::triage
