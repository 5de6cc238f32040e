#include "homebot/scenario/dialogue.hpp"

#include "homebot/error.hpp"

namespace homebot::scenario {

std::string_view to_string(Utterance u) {
  switch (u) {
    case Utterance::Yes: return "yes";
    case Utterance::No: return "no";
    case Utterance::Silent: return "silent";
  }
  return "silent";
}

std::string_view to_string(Decision d) {
  switch (d) {
    case Decision::CallEMS: return "call_ems";
    case Decision::StandDown: return "stand_down";
    case Decision::TimeoutCall: return "timeout_call";
  }
  return "timeout_call";
}

Decision decide(Utterance heard) {
  switch (heard) {
    case Utterance::Yes: return Decision::CallEMS;
    case Utterance::No: return Decision::StandDown;
    case Utterance::Silent: return Decision::TimeoutCall;
  }
  return Decision::TimeoutCall;
}

Utterance heard_answer(Utterance spoken, bool garbled) {
  if (!garbled || spoken == Utterance::Silent) return spoken;
  return spoken == Utterance::Yes ? Utterance::No : Utterance::Yes;
}

triage::VitalsReport true_vitals(const world::VitalsProfile& v, const triage::TriageThresholds& t) {
  using namespace triage;
  const Circulation c = assess_cyanosis(v.hand_blueness, t);
  const Airway a = assess_airway(v.chin_pitch_deg, face_orientation_from_string(v.face_orientation), t);
  Breathing b = Breathing::Absent;
  if (v.breathing_interval > 0.0) {
    const double rate = 60.0 / v.breathing_interval;
    if (v.breathing_cv > t.agonal_cv && rate < t.slow_rate)
      b = Breathing::Agonal;
    else if (rate > t.fast_rate)
      b = Breathing::Fast;
    else if (rate < t.slow_rate)
      b = Breathing::Slow;
    else
      b = Breathing::Normal;
  }
  BleedingVerdict bleed;
  const BleedLocation loc = bleed_location_from_string(v.bleeding_location);
  if (loc != BleedLocation::None && v.bleeding_rate_cm2_s > t.bleed_rate_min) {
    bleed.location = loc;
    bleed.severity = v.bleeding_rate_cm2_s >= t.bleed_rate_hi ? BleedSeverity::Massive : BleedSeverity::Slight;
  }
  return triage_report(c, a, b, bleed);
}

bool needs_help(const world::VitalsProfile& v, const triage::TriageThresholds& t) {
  const auto r = true_vitals(v, t);
  return r.circulation != triage::Circulation::Normal || r.airway != triage::Airway::Open ||
         r.breathing != triage::Breathing::Normal || r.bleeding.severity != triage::BleedSeverity::None;
}

DialogueOutcome dialogue_exchange(const world::AgentState& agent, double p, double timeout, Rng& rng,
                                  const triage::TriageThresholds& t) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("dialogue_exchange: channel accuracy must be in [0,1]");
  const double u_respond = rng.uniform();
  const double u_channel = rng.uniform();
  DialogueOutcome out;
  const bool responds = !agent.away && u_respond < agent.responsiveness && agent.response_delay <= timeout;
  if (responds) {
    out.spoken = needs_help(agent.vitals_truth, t) ? Utterance::Yes : Utterance::No;
    out.heard = heard_answer(out.spoken, u_channel >= p);
    out.elapsed = agent.response_delay;
  } else {
    out.elapsed = timeout;
  }
  out.decision = decide(out.heard);
  out.ideal = decide(out.spoken);
  return out;
}

}  // namespace homebot::scenario
