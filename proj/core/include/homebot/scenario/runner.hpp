#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "homebot/detection/anomaly.hpp"
#include "homebot/scenario/config.hpp"
#include "homebot/scenario/event_log.hpp"
#include "homebot/scenario/metrics.hpp"

namespace homebot::scenario {

struct RunResult {
  EventLog log;
  RunMetrics metrics;
  int status = 0;  // 0 success, 2 runtime failure
  std::string error;
};

/// The anomaly forest a scenario uses: loaded from the configured model
/// file or trained on the simulated corpus.
detection::Forest scenario_forest(const ScenarioConfig& cfg);

/// Runs one scenario: the world advances in fixed steps, sensor events feed
/// the anomaly forest, a confirmed anomaly dispatches the robot along an A*
/// path, the robot asks the person whether to call for help, runs triage on
/// an unresponsive or fallen person, and after a Red report follows an
/// orienteering tour over the bystanders it sees, asking each one for help.
/// Runtime errors are logged and set status 2.
RunResult run_scenario(const ScenarioConfig& cfg);
RunResult run_scenario(const ScenarioConfig& cfg, const detection::Forest& forest);

/// Runs seeds seed, seed+1, ... in parallel on up to `threads` workers
/// (0: hardware concurrency). Results are in seed order.
std::vector<RunResult> run_batch(const ScenarioConfig& cfg, int runs, unsigned threads = 0);

}  // namespace homebot::scenario
