#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "homebot/error.hpp"
#include "homebot/scenario/config.hpp"
#include "homebot/scenario/dialogue.hpp"
#include "homebot/scenario/event_log.hpp"
#include "homebot/scenario/metrics.hpp"
#include "homebot/scenario/runner.hpp"

using namespace homebot;
using namespace homebot::scenario;
using nlohmann::json;

namespace {

const std::string kScenarios = HOMEBOT_SOURCE_DIR "/scenarios/";

json minimal_doc() {
  return {{"name", "t"},
          {"seed", 1},
          {"duration", 5},
          {"agents", json::array({{{"id", "a"}, {"cell", {15, 20}}}})}};
}

// Scenario runs are shared between tests; each bundled file runs once here.
const RunResult& bundled(const std::string& name) {
  static std::map<std::string, RunResult> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, run_scenario(load_scenario_file(kScenarios + name))).first;
  return it->second;
}

std::vector<std::pair<std::string, std::string>> skeleton(const EventLog& log) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& r : log.records()) {
    const std::string m = r["module"], t = r["type"];
    if (m == "sensors" || m == "detection" || m == "world" || (m == "scenario" && t == "robot_mode")) continue;
    if (m == "planning" && (t == "search" || t == "tour_plan")) continue;
    out.emplace_back(m, t);
  }
  return out;
}

world::AgentState responsive_agent(bool healthy) {
  world::AgentState a;
  a.id = "p";
  a.responsiveness = 1.0;
  if (!healthy) a.vitals_truth.breathing_interval = 0.0;
  return a;
}

}  // namespace

TEST(Config, MinimalDocumentUsesDefaults) {
  const auto cfg = parse_scenario(minimal_doc());
  EXPECT_EQ(cfg.map.rooms().size(), 4u);
  EXPECT_DOUBLE_EQ(cfg.motion.speed, 0.3);
  EXPECT_DOUBLE_EQ(cfg.dialogue.accuracy, 0.769);
  EXPECT_DOUBLE_EQ(cfg.dialogue.timeout, 10.0);
  ASSERT_EQ(cfg.agents.size(), 1u);
}

TEST(Config, ErrorsNameTheField) {
  auto expect_error = [](json doc, const std::string& needle) {
    try {
      (void)parse_scenario(doc);
      ADD_FAILURE() << "accepted " << doc.dump();
    } catch (const Error& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  auto doc = minimal_doc();
  doc["dialogue"] = {{"accuracy", 1.5}};
  expect_error(doc, "accuracy");
  doc = minimal_doc();
  doc["duraton"] = 5;
  expect_error(doc, "duraton");
  doc = minimal_doc();
  doc["duration"] = -1;
  expect_error(doc, "duration");
  doc = minimal_doc();
  doc["agents"][0]["cell"] = {0, 0};
  expect_error(doc, "a");
  doc = minimal_doc();
  doc["agents"][0]["script"] = json::array({{{"action", "teleport"}}});
  expect_error(doc, "teleport");
  doc = minimal_doc();
  doc["agents"][0]["script"] = json::array({{{"action", "contact"}, {"sensor", "c_garage"}}});
  expect_error(doc, "c_garage");
  doc = minimal_doc();
  doc["map"] = "missing_map.json";
  expect_error(doc, "missing_map.json");
}

TEST(Config, LoadFileErrors) {
  EXPECT_THROW((void)load_scenario_file("/nonexistent/scenario.json"), Error);
  const auto path = std::filesystem::path(::testing::TempDir()) / "broken.json";
  std::ofstream(path) << "{\"name\": ";
  EXPECT_THROW((void)load_scenario_file(path.string()), ParseError);
}

TEST(Config, WithSeedRedrawsPlacements) {
  const auto cfg = load_scenario_file(kScenarios + "dispatch_batch.json");
  std::set<std::pair<double, double>> targets;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto c = with_seed(cfg, s);
    EXPECT_EQ(c.seed, s);
    for (const auto& act : c.agents[0].script)
      if (const auto* m = std::get_if<world::MoveTo>(&act.action))
        targets.insert({m->waypoints.back().x(), m->waypoints.back().y()});
  }
  EXPECT_GE(targets.size(), 2u);
}

TEST(EventLog, RecordsAndOrdering) {
  EventLog log;
  log.add(0.0, "scenario", "start", {{"seed", 1}});
  log.add(0.1000004, "planning", "dispatch");
  EXPECT_EQ(log.records()[1]["t"], 0.1);
  EXPECT_THROW(log.add(0.05, "x", "y"), InvalidArgument);
  EXPECT_THROW(log.add(1.0, "x", "y", json::array()), InvalidArgument);
  const auto parsed = parse_log(log.to_jsonl());
  ASSERT_EQ(parsed.size(), 2u);
  EXPECT_EQ(parsed[0]["seed"], 1);
  EXPECT_EQ(parsed[1]["module"], "planning");
}

TEST(EventLog, ParseErrorsNameTheLine) {
  try {
    (void)parse_log("{\"t\":0,\"module\":\"a\",\"type\":\"b\"}\n\n{oops\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("3"), std::string::npos) << e.what();
  }
  EXPECT_TRUE(parse_log("\n\n").empty());
}

TEST(Metrics, EmptyLogIsAllNull) {
  const auto m = compute_metrics({});
  EXPECT_EQ(m.dispatches, 0);
  EXPECT_FALSE(m.time_to_detect);
  EXPECT_FALSE(m.time_to_arrive);
  EXPECT_FALSE(m.dialogue_correct);
  EXPECT_FALSE(m.triage_accuracy);
  EXPECT_FALSE(m.help_target_correct);
  EXPECT_TRUE(to_json(m)["time_to_arrive"].is_null());
}

TEST(Metrics, MalformedRecord) {
  EXPECT_THROW(compute_metrics({json{{"t", "soon"}, {"module", "a"}, {"type", "b"}}}), ParseError);
}

TEST(Metrics, ArrivalMinusDispatch) {
  const auto& run = bundled("bathroom_fall.json");
  const auto& recs = run.log.records();
  double dispatch = -1, arrival = -1;
  for (const auto& r : recs) {
    if (r["module"] == "planning" && r["type"] == "dispatch" && dispatch < 0) dispatch = r["t"];
    if (r["module"] == "planning" && r["type"] == "arrival" && arrival < 0) arrival = r["t"];
  }
  ASSERT_GE(dispatch, 0.0);
  ASSERT_GE(arrival, dispatch);
  ASSERT_TRUE(run.metrics.time_to_arrive);
  EXPECT_DOUBLE_EQ(*run.metrics.time_to_arrive, arrival - dispatch);
  EXPECT_LT(*run.metrics.time_to_arrive, 60.0);
  EXPECT_EQ(compute_metrics(recs).time_to_arrive, run.metrics.time_to_arrive);
}

TEST(Metrics, AggregateExcludesRooms) {
  RunMetrics a, b, c;
  a.time_to_arrive = 10.0;
  a.dispatch_room = "kitchen";
  b.time_to_arrive = 20.0;
  b.dispatch_room = "hallway";
  c.time_to_arrive = 100.0;
  c.dispatch_room = "bathroom";
  const auto agg = aggregate({a, b, c}, {"bathroom"});
  EXPECT_EQ(agg.runs, 3);
  EXPECT_EQ(agg.timed_arrivals, 2);
  EXPECT_DOUBLE_EQ(*agg.mean_time_to_arrive, 15.0);
  EXPECT_DOUBLE_EQ(*agg.max_time_to_arrive, 20.0);
  EXPECT_NEAR(*agg.sd_time_to_arrive, std::sqrt(50.0), 1e-12);
}

TEST(Dialogue, DecisionTable) {
  EXPECT_EQ(decide(Utterance::Yes), Decision::CallEMS);
  EXPECT_EQ(decide(Utterance::No), Decision::StandDown);
  EXPECT_EQ(decide(Utterance::Silent), Decision::TimeoutCall);
  const std::map<std::pair<Utterance, bool>, Decision> table{
      {{Utterance::Yes, false}, Decision::CallEMS},  {{Utterance::Yes, true}, Decision::StandDown},
      {{Utterance::No, false}, Decision::StandDown}, {{Utterance::No, true}, Decision::CallEMS},
      {{Utterance::Silent, false}, Decision::TimeoutCall}, {{Utterance::Silent, true}, Decision::TimeoutCall}};
  for (const auto& [key, want] : table) EXPECT_EQ(decide(heard_answer(key.first, key.second)), want);
}

TEST(Dialogue, UnresponsiveAlwaysTimesOut) {
  world::AgentState a = responsive_agent(true);
  a.responsiveness = 0.0;
  Rng rng(1);
  for (double p : {0.0, 0.5, 1.0})
    for (int i = 0; i < 50; ++i) {
      const auto out = dialogue_exchange(a, p, 10.0, rng);
      EXPECT_EQ(out.decision, Decision::TimeoutCall);
      EXPECT_EQ(out.elapsed, 10.0);
    }
}

TEST(Dialogue, PerfectChannelHealthyStandsDown) {
  Rng rng(2);
  for (int i = 0; i < 50; ++i) {
    EXPECT_EQ(dialogue_exchange(responsive_agent(true), 1.0, 10.0, rng).decision, Decision::StandDown);
    EXPECT_EQ(dialogue_exchange(responsive_agent(false), 1.0, 10.0, rng).decision, Decision::CallEMS);
  }
}

TEST(Dialogue, RecognitionRate) {
  Rng rng(769);
  int correct = 0;
  for (int i = 0; i < 1000; ++i) correct += dialogue_exchange(responsive_agent(i % 2 == 0), 0.769, 10.0, rng).heard_correct();
  EXPECT_NEAR(correct / 1000.0, 0.769, 0.03);
  EXPECT_THROW(dialogue_exchange(responsive_agent(true), 1.2, 10.0, rng), InvalidArgument);
}

TEST(Dialogue, LateAnswerIsSilence) {
  auto a = responsive_agent(true);
  a.response_delay = 12.0;
  Rng rng(3);
  EXPECT_EQ(dialogue_exchange(a, 1.0, 10.0, rng).decision, Decision::TimeoutCall);
}

TEST(Scenario, QuietDayNeverDispatches) {
  const auto& run = bundled("quiet_day.json");
  EXPECT_EQ(run.status, 0);
  EXPECT_EQ(run.metrics.dispatches, 0);
  for (const auto& r : run.log.records())
    if (r["type"] == "robot_mode") EXPECT_EQ(r["mode"], "idle");
}

TEST(Scenario, BathroomFallDispatchesToBathroom) {
  const auto& run = bundled("bathroom_fall.json");
  EXPECT_EQ(run.status, 0);
  EXPECT_EQ(run.metrics.dispatch_room, "bathroom");
  ASSERT_TRUE(run.metrics.time_to_detect);
  EXPECT_GT(*run.metrics.time_to_detect, 0.0);
}

TEST(Scenario, UnresponsiveVictimPipeline) {
  const auto& run = bundled("unresponsive_victim_two_bystanders.json");
  ASSERT_EQ(run.status, 0) << run.error;
  const auto sk = skeleton(run.log);
  const std::vector<std::pair<std::string, std::string>> expected{
      {"scenario", "start"},       {"scenario", "ground_truth"}, {"planning", "dispatch"},
      {"planning", "arrival"},     {"dialogue", "ask"},          {"dialogue", "timeout"},
      {"dialogue", "decision"},    {"dialogue", "ems_call"},     {"triage", "start"},
      {"triage", "report"},        {"scenario", "ground_truth"}, {"planning", "seek_help"},
      {"scenario", "ground_truth"}};
  ASSERT_GE(sk.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_EQ(sk[i], expected[i]) << "record " << i;
  EXPECT_EQ(sk.back(), (std::pair<std::string, std::string>{"scenario", "end"}));
  EXPECT_EQ(run.metrics.help_target_correct, std::optional<bool>(true));
  EXPECT_EQ(run.metrics.dialogue_correct, std::optional<bool>(true));
  bool red = false;
  for (const auto& r : run.log.records())
    if (r["module"] == "triage" && r["type"] == "report") red = r["report"]["priority"] == "red";
  EXPECT_TRUE(red);
}

TEST(Scenario, MidnightExitFindsNobody) {
  const auto& run = bundled("midnight_exit.json");
  EXPECT_EQ(run.status, 0);
  EXPECT_GE(run.metrics.dispatches, 1);
  bool no_person = false;
  for (const auto& r : run.log.records()) no_person |= r["type"] == "no_person";
  EXPECT_TRUE(no_person);
}

TEST(Scenario, EveryBundledScenarioIsDeterministic) {
  for (const auto& entry : std::filesystem::directory_iterator(kScenarios)) {
    if (entry.path().extension() != ".json") continue;
    const auto cfg = load_scenario_file(entry.path().string());
    const auto forest = scenario_forest(cfg);
    const auto a = run_scenario(cfg, forest).log.to_jsonl();
    const auto b = run_scenario(cfg, forest).log.to_jsonl();
    EXPECT_EQ(a, b) << entry.path().filename();
    EXPECT_FALSE(a.empty());
  }
}

TEST(Scenario, LogInvariants) {
  const auto& run = bundled("unresponsive_victim_two_bystanders.json");
  double last = 0.0;
  for (const auto& r : run.log.records()) {
    ASSERT_TRUE(r.contains("t") && r.contains("module") && r.contains("type"));
    EXPECT_GE(r["t"].get<double>(), last);
    last = r["t"];
  }
}

TEST(Batch, SeedOrderAndArrivalEnvelope) {
  const auto cfg = load_scenario_file(kScenarios + "dispatch_batch.json");
  const auto runs = run_batch(cfg, 20, 4);
  ASSERT_EQ(runs.size(), 20u);
  std::vector<RunMetrics> metrics;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    EXPECT_EQ(runs[i].log.records().front()["seed"], cfg.seed + i);
    metrics.push_back(runs[i].metrics);
  }
  const auto agg = aggregate(metrics, cfg.timing_excluded_rooms);
  ASSERT_TRUE(agg.mean_time_to_arrive);
  EXPECT_GE(*agg.mean_time_to_arrive, 5.9);
  EXPECT_LE(*agg.mean_time_to_arrive, 21.7);
  EXPECT_LT(*agg.max_time_to_arrive, 60.0);
  // Same batch again on one thread gives identical logs.
  const auto serial = run_batch(cfg, 3, 1);
  for (std::size_t i = 0; i < serial.size(); ++i) EXPECT_EQ(serial[i].log.to_jsonl(), runs[i].log.to_jsonl());
}
