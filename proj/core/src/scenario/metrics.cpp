#include "homebot/scenario/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "homebot/error.hpp"

namespace homebot::scenario {

using nlohmann::json;

namespace {

const json* first_of(const std::vector<json>& log, std::string_view module, std::string_view type,
                     std::string_view kind = {}) {
  for (const auto& r : log)
    if (r["module"] == module && r["type"] == type && (kind.empty() || r.value("kind", "") == kind)) return &r;
  return nullptr;
}

double field_match(const json& report, const json& truth) {
  int ok = 0;
  ok += report.at("circulation") == truth.at("circulation");
  ok += report.at("airway") == truth.at("airway");
  ok += report.at("breathing") == truth.at("breathing");
  ok += report.at("bleeding").at("location") == truth.at("bleeding").at("location");
  ok += report.at("bleeding").at("severity") == truth.at("bleeding").at("severity");
  return ok / 5.0;
}

std::optional<double> mean(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

RunMetrics compute_metrics(const std::vector<json>& log) {
  for (std::size_t i = 0; i < log.size(); ++i) {
    const auto& r = log[i];
    if (!r.is_object() || !r.contains("t") || !r["t"].is_number() || !r.contains("module") ||
        !r["module"].is_string() || !r.contains("type") || !r["type"].is_string())
      throw ParseError("record " + std::to_string(i + 1) + ": needs numeric 't' and string 'module', 'type'");
  }
  RunMetrics m;
  try {
    for (const auto& r : log)
      if (r["module"] == "planning" && r["type"] == "dispatch") ++m.dispatches;

    const json* anomaly = first_of(log, "detection", "anomaly");
    if (anomaly) {
      const double ta = (*anomaly)["t"].get<double>();
      for (const auto& r : log) {
        if (r["module"] != "scenario" || r["type"] != "ground_truth" || r.value("kind", "") != "incident") continue;
        const double ti = r["t"].get<double>();
        if (ti <= ta) {
          m.time_to_detect = ta - ti;
          break;
        }
      }
    }
    const json* dispatch = first_of(log, "planning", "dispatch");
    if (dispatch) {
      m.dispatch_room = dispatch->value("room", "");
      const double td = (*dispatch)["t"].get<double>();
      for (const auto& r : log)
        if (r["module"] == "planning" && r["type"] == "arrival" && r["t"].get<double>() >= td) {
          m.time_to_arrive = r["t"].get<double>() - td;
          break;
        }
    }
    if (const json* d = first_of(log, "dialogue", "decision"))
      m.dialogue_correct = d->at("decision") == d->at("ideal");
    const json* report = first_of(log, "triage", "report");
    const json* truth = first_of(log, "scenario", "ground_truth", "triage");
    if (report && truth) m.triage_accuracy = field_match(report->at("report"), truth->at("report"));
    if (const json* target = first_of(log, "scenario", "ground_truth", "help_target")) {
      m.help_target_correct = false;
      for (const auto& r : log)
        if (r["module"] == "planning" && r["type"] == "help_reached" && r.at("agent") == target->at("agent"))
          m.help_target_correct = true;
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed record field: ") + e.what());
  }
  return m;
}

BatchMetrics aggregate(const std::vector<RunMetrics>& runs, const std::vector<std::string>& excluded_rooms) {
  BatchMetrics b;
  b.runs = static_cast<int>(runs.size());
  std::vector<double> detect, arrive, triage;
  int dialogues = 0, dialogue_ok = 0, helps = 0, help_ok = 0;
  for (const auto& r : runs) {
    b.dispatches += r.dispatches;
    if (r.time_to_detect) detect.push_back(*r.time_to_detect);
    const bool excluded =
        std::find(excluded_rooms.begin(), excluded_rooms.end(), r.dispatch_room) != excluded_rooms.end();
    if (r.time_to_arrive && !excluded) arrive.push_back(*r.time_to_arrive);
    if (r.triage_accuracy) triage.push_back(*r.triage_accuracy);
    if (r.dialogue_correct) {
      ++dialogues;
      dialogue_ok += *r.dialogue_correct;
    }
    if (r.help_target_correct) {
      ++helps;
      help_ok += *r.help_target_correct;
    }
  }
  b.timed_arrivals = static_cast<int>(arrive.size());
  b.mean_time_to_detect = mean(detect);
  b.mean_time_to_arrive = mean(arrive);
  if (b.mean_time_to_arrive) {
    double ss = 0.0;
    for (double v : arrive) ss += (v - *b.mean_time_to_arrive) * (v - *b.mean_time_to_arrive);
    b.sd_time_to_arrive = arrive.size() > 1 ? std::sqrt(ss / static_cast<double>(arrive.size() - 1)) : 0.0;
    b.max_time_to_arrive = *std::max_element(arrive.begin(), arrive.end());
  }
  if (dialogues) b.dialogue_correct_rate = static_cast<double>(dialogue_ok) / dialogues;
  b.mean_triage_accuracy = mean(triage);
  if (helps) b.help_target_rate = static_cast<double>(help_ok) / helps;
  return b;
}

namespace {

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

json to_json(const RunMetrics& m) {
  return {{"dispatches", m.dispatches},
          {"dispatch_room", m.dispatch_room.empty() ? json(nullptr) : json(m.dispatch_room)},
          {"time_to_detect", opt(m.time_to_detect)},
          {"time_to_arrive", opt(m.time_to_arrive)},
          {"dialogue_correct", opt(m.dialogue_correct)},
          {"triage_accuracy", opt(m.triage_accuracy)},
          {"help_target_correct", opt(m.help_target_correct)}};
}

json to_json(const BatchMetrics& m) {
  return {{"runs", m.runs},
          {"dispatches", m.dispatches},
          {"timed_arrivals", m.timed_arrivals},
          {"mean_time_to_detect", opt(m.mean_time_to_detect)},
          {"mean_time_to_arrive", opt(m.mean_time_to_arrive)},
          {"sd_time_to_arrive", opt(m.sd_time_to_arrive)},
          {"max_time_to_arrive", opt(m.max_time_to_arrive)},
          {"dialogue_correct_rate", opt(m.dialogue_correct_rate)},
          {"mean_triage_accuracy", opt(m.mean_triage_accuracy)},
          {"help_target_rate", opt(m.help_target_rate)}};
}

}  // namespace homebot::scenario
