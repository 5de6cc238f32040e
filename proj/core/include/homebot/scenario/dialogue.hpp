#pragma once

#include <string_view>

#include "homebot/rng.hpp"
#include "homebot/triage/triage.hpp"
#include "homebot/world/world.hpp"

namespace homebot::scenario {

enum class Utterance { Yes, No, Silent };
enum class Decision { CallEMS, StandDown, TimeoutCall };

std::string_view to_string(Utterance u);
std::string_view to_string(Decision d);

/// The robot asks whether it should call emergency services. A yes or
/// silence leads to a call; a no sends the robot home.
Decision decide(Utterance heard);

/// What the robot hears when the channel garbles the answer: yes and no
/// swap, silence stays silence.
Utterance heard_answer(Utterance spoken, bool garbled);

/// Ground-truth vital-sign verdicts of a profile, without perception noise.
triage::VitalsReport true_vitals(const world::VitalsProfile& v, const triage::TriageThresholds& t = {});

/// A person needs help iff any of their true vital-sign verdicts is abnormal.
bool needs_help(const world::VitalsProfile& v, const triage::TriageThresholds& t = {});

struct DialogueOutcome {
  Utterance spoken = Utterance::Silent;  // what the person said (Silent if no answer)
  Utterance heard = Utterance::Silent;
  Decision decision = Decision::TimeoutCall;
  Decision ideal = Decision::TimeoutCall;  // decision on a perfect channel
  double elapsed = 0.0;  // seconds from the question to the decision
  [[nodiscard]] bool heard_correct() const { return spoken != Utterance::Silent && heard == spoken; }
};

/// One exchange. The person answers with probability `responsiveness`
/// after `response_delay`; answers later than the timeout count as silence.
/// The channel garbles an answer with probability 1 - p. Exactly two
/// uniforms are drawn per call. Throws InvalidArgument unless p is in [0,1].
DialogueOutcome dialogue_exchange(const world::AgentState& agent, double p, double timeout, Rng& rng,
                                  const triage::TriageThresholds& t = {});

}  // namespace homebot::scenario
