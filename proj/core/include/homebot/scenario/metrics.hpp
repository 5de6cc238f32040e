#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace homebot::scenario {

struct RunMetrics {
  int dispatches = 0;
  std::string dispatch_room;
  std::optional<double> time_to_detect;  // first anomaly verdict minus incident onset
  std::optional<double> time_to_arrive;  // arrival minus dispatch
  std::optional<bool> dialogue_correct;  // decision equals the perfect-channel decision
  std::optional<double> triage_accuracy; // fraction of report fields matching ground truth
  std::optional<bool> help_target_correct;  // the most helpful bystander was among those reached
};

/// Aggregates a run's log; ground truth is read from the log's
/// "ground_truth" records. An empty log gives all-null metrics. Throws
/// ParseError naming the record index of a malformed record.
RunMetrics compute_metrics(const std::vector<nlohmann::json>& log);

struct BatchMetrics {
  int runs = 0;
  int dispatches = 0;
  int timed_arrivals = 0;  // arrivals counted in the timing statistics
  std::optional<double> mean_time_to_detect;
  std::optional<double> mean_time_to_arrive;
  std::optional<double> sd_time_to_arrive;
  std::optional<double> max_time_to_arrive;
  std::optional<double> dialogue_correct_rate;
  std::optional<double> mean_triage_accuracy;
  std::optional<double> help_target_rate;
};

/// Averages over runs. Arrivals whose dispatch room is in `excluded_rooms`
/// are left out of the timing statistics.
BatchMetrics aggregate(const std::vector<RunMetrics>& runs, const std::vector<std::string>& excluded_rooms = {});

nlohmann::json to_json(const RunMetrics& m);
nlohmann::json to_json(const BatchMetrics& m);

}  // namespace homebot::scenario
