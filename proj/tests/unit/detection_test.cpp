#include <cmath>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "homebot/detection/anomaly.hpp"
#include "homebot/detection/breath.hpp"
#include "homebot/detection/fallen.hpp"
#include "homebot/detection/presence.hpp"
#include "homebot/detection/trend.hpp"
#include "homebot/error.hpp"
#include "homebot/scenario/config.hpp"
#include "homebot/scenario/corpus.hpp"
#include "homebot/scenario/trials.hpp"
#include "generators.hpp"

using namespace homebot;
using namespace homebot::detection;

namespace {

using sensors::GasSample;

using gen::best_split;
using gen::rise_then_decay;

const world::HomeMap& apartment() {
  static const auto map = world::default_apartment();
  return map;
}

sensors::SensorEvent event(double t, const char* id, world::SensorKind kind, bool value = true) {
  return {t, id, kind, value};
}

}  // namespace

TEST(Breath, ConstantSignalNeverTransitions) {
  auto s = BreathDetectorState::initial(100.0, 1.5);
  for (int i = 0; i < 1000; ++i) {
    auto [next, tr] = breath_step(s, {i * 0.1, 100.0});
    EXPECT_FALSE(tr);
    s = next;
  }
}

TEST(Breath, JumpFlipsToCloseOnThatStep) {
  const auto s = BreathDetectorState::initial(100.0, 1.5);
  const auto [next, tr] = breath_step(s, {1.0, 115.0});
  ASSERT_TRUE(tr);
  EXPECT_EQ(tr->to, Presence::Close);
  EXPECT_EQ(tr->timestamp, 1.0);
  EXPECT_EQ(next.presence, Presence::Close);
}

TEST(Breath, ExpectedDirectionResandwiches) {
  auto s = BreathDetectorState::initial(100.0, 1.0);
  for (double r : {99.0, 97.0, 90.0}) {
    auto [next, tr] = breath_step(s, {0.0, r});
    EXPECT_FALSE(tr);
    EXPECT_DOUBLE_EQ(next.upper, r + 1.0);
    EXPECT_DOUBLE_EQ(next.lower, r - 1.0);
    s = next;
  }
}

TEST(Breath, SandwichInvariantAndAlternation) {
  Rng rng(17);
  for (int signal = 0; signal < 10000; ++signal) {
    const double margin = rng.uniform(0.05, 3.0);
    double x = rng.uniform(50, 150);
    auto s = BreathDetectorState::initial(x, margin);
    Presence last = s.presence;
    for (int k = 0; k < 50; ++k) {
      x += rng.normal(0.0, rng.bernoulli(0.1) ? 10.0 : 1.0);
      auto [next, tr] = breath_step(s, {k * 1.0, x});
      ASSERT_LT(next.lower, x);
      ASSERT_LT(x, next.upper);
      if (tr) {
        ASSERT_NE(tr->to, last);
        last = tr->to;
      }
      ASSERT_EQ(next.presence, last);
      s = next;
    }
  }
}

TEST(Breath, DetectorNoiseEstimateTracksSigma) {
  BreathDetector d;
  Rng rng(2);
  for (int i = 0; i < 60; ++i) d.update({double(i), 100.0 + rng.normal(0.0, 0.5)});
  EXPECT_NEAR(d.noise_estimate(), 0.5, 0.2);
  EXPECT_TRUE(d.initialized());
}

TEST(Breath, ApproachWithdrawTrials) {
  const auto r = scenario::run_breath_trials({});
  EXPECT_EQ(r.changes, 70);
  EXPECT_LE(r.mean_latency(), 10.0);
  EXPECT_LT(r.max_latency, 60.0);
}

TEST(Trend, SingleExponentialDecay) {
  std::vector<GasSample> s;
  for (int i = 0; i < 60; ++i) s.push_back({i * 0.5, 100.0 + 30.0 * std::exp(-i * 0.5 / 20.0)});
  const auto r = trend_filter(s);
  EXPECT_EQ(r.segments.size(), 1u);
  EXPECT_TRUE(r.change_points.empty());
}

TEST(Trend, ConstantSignal) {
  const std::vector<GasSample> s(40, GasSample{0.0, 100.0});
  std::vector<GasSample> timed = s;
  for (std::size_t i = 0; i < timed.size(); ++i) timed[i].timestamp = double(i);
  const auto r = trend_filter(timed);
  ASSERT_EQ(r.segments.size(), 1u);
  EXPECT_NEAR(r.segments[0].slope(10.0), 0.0, 1e-9);
  EXPECT_TRUE(r.change_points.empty());
}

TEST(Trend, RiseDecayJunction) {
  const auto [s, junction] = rise_then_decay(100.0, 50.0, 10.0, 30.0, 0.5);
  const auto r = trend_filter(s);
  ASSERT_EQ(r.change_points.size(), 1u);
  const auto idx = static_cast<long>(r.change_points[0].index);
  EXPECT_LE(std::labs(idx - static_cast<long>(junction)), 2);
  EXPECT_LE(std::labs(idx - static_cast<long>(best_split(s))), 2);
  EXPECT_EQ(r.change_points[0].direction, ChangeDirection::Falling);
}

TEST(Trend, RandomJunctionsAndSingleExponentials) {
  Rng rng(5);
  for (int k = 0; k < 100; ++k) {
    const double dt = k % 2 ? 0.5 : 1.0;
    const auto [s, junction] =
        rise_then_decay(rng.uniform(80, 120), rng.uniform(5, 60), rng.uniform(6, 14), rng.uniform(20, 40), dt);
    const auto r = trend_filter(s);
    ASSERT_EQ(r.change_points.size(), 1u) << "case " << k;
    EXPECT_LE(std::labs(static_cast<long>(r.change_points[0].index) - static_cast<long>(junction)), 2) << "case " << k;

    EXPECT_TRUE(trend_filter(gen::single_exponential(rng, dt)).change_points.empty()) << "case " << k;
  }
}

TEST(Trend, RejectsShortWindows) {
  const std::vector<GasSample> s(5);
  EXPECT_THROW(trend_filter(s), InvalidArgument);
}

TEST(Presence, FastCloseMeansPresent) {
  const std::vector<BreathTransition> fast{{1.0, Presence::Close}};
  EXPECT_TRUE(fuse_presence(fast, {}, {}, {.now = 2.0}).present);
  const std::vector<BreathTransition> gone{{1.0, Presence::Close}, {5.0, Presence::Far}};
  EXPECT_FALSE(fuse_presence(gone, {}, {}, {.now = 6.0}).present);
}

TEST(Presence, RecentRisingChangeMeansPresent) {
  const std::vector<ChangePoint> slow{{10, 10.0, ChangeDirection::Rising}};
  EXPECT_TRUE(fuse_presence({}, slow, {}, {.now = 20.0}).present);
  EXPECT_FALSE(fuse_presence({}, slow, {}, {.now = 100.0}).present);
}

TEST(Presence, StrongestPanSideWins) {
  const std::vector<PanSample> pan{{0.5, 105.0}, {-0.5, 101.0}};
  EXPECT_EQ(fuse_presence({}, {}, pan, {}).side, Side::Left);
  const std::vector<PanSample> flat{{0.5, 100.2}, {-0.5, 100.0}};
  EXPECT_EQ(fuse_presence({}, {}, flat, {}).side, Side::Unknown);
}

TEST(Presence, SimulatedSideTrial) {
  int left = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) left += scenario::run_side_trial({}, seed) == Side::Left;
  EXPECT_GE(left, 90);
}

TEST(Features, EmptyWindow) {
  FeatureConfig cfg;
  cfg.day_start_offset = 23.0 * 3600.0;
  const auto f = extract_features({}, 100.0, apartment(), cfg);
  EXPECT_EQ(f.bucket, TimeBucket::Night);
  for (const auto& r : f.rooms) {
    EXPECT_EQ(r.pressure_dwell, 0.0);
    EXPECT_EQ(r.pir_activity, 0.0);
  }
  EXPECT_EQ(f.seconds_since_motion, 0.0);
}

TEST(Features, BathroomDwell) {
  std::vector<sensors::SensorEvent> events;
  for (int k = 1; k <= 3000; ++k) events.push_back(event(k * 0.1, "p_bathroom", world::SensorKind::Pressure));
  const auto f = extract_features(events, 300.0, apartment());
  for (const auto& r : f.rooms) EXPECT_NEAR(r.pressure_dwell, r.room == "bathroom" ? 300.0 : 0.0, 1e-6);
  EXPECT_EQ(f.seconds_since_motion, 300.0);
}

TEST(Features, TimeBuckets) {
  EXPECT_EQ(time_bucket(3 * 3600.0), TimeBucket::Night);
  EXPECT_EQ(time_bucket(7 * 3600.0), TimeBucket::Morning);
  EXPECT_EQ(time_bucket(12 * 3600.0), TimeBucket::Day);
  EXPECT_EQ(time_bucket(20 * 3600.0), TimeBucket::Evening);
  EXPECT_EQ(time_bucket(23 * 3600.0 + 86400.0), TimeBucket::Night);
}

TEST(Features, MidnightExitShowsHallwayMotionAtNight) {
  const auto cfg = scenario::load_scenario_file(HOMEBOT_SOURCE_DIR "/scenarios/midnight_exit.json");
  world::WorldState w;
  w.map = cfg.map;
  w.agents = cfg.agents;
  w.rng = Rng(cfg.seed);
  std::vector<sensors::SensorEvent> events;
  double hallway_pir = 0.0;
  FeatureConfig fc = cfg.detection.features;
  fc.day_start_offset = cfg.start_time_of_day;
  for (int k = 1; k * cfg.dt <= 200.0; ++k) {
    w = world::step_world(std::move(w), cfg.dt);
    w.clock = k * cfg.dt;
    for (auto& e : sensors::sample_environment_sensors(w)) events.push_back(e);
    const auto f = extract_features(events, w.clock, w.map, fc);
    EXPECT_EQ(f.bucket, TimeBucket::Night);
    for (const auto& r : f.rooms)
      if (r.room == "hallway") hallway_pir = std::max(hallway_pir, r.pir_activity);
  }
  EXPECT_GT(hallway_pir, 0.0);
}

TEST(Forest, SeparableToySet) {
  std::vector<std::vector<double>> rows;
  std::vector<bool> labels;
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const double dwell = rng.uniform(0, 300), other = rng.uniform(0, 1);
    rows.push_back({dwell, other});
    labels.push_back(dwell > 100.0);
  }
  ForestParams p;
  p.n_trees = 10;
  p.max_depth = 8;
  const auto forest = train_forest(rows, labels, {"dwell", "other"}, p);
  for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(forest.score(rows[i]) >= 0.5, labels[i]);
}

TEST(Forest, DeterministicAndSerializable) {
  std::vector<std::vector<double>> rows;
  std::vector<bool> labels;
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    rows.push_back({rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 1)});
    labels.push_back(rows.back()[0] + rows.back()[1] > 1.0);
  }
  const auto a = train_forest(rows, labels, {"a", "b", "c"}, {});
  const auto b = train_forest(rows, labels, {"a", "b", "c"}, {});
  EXPECT_EQ(to_json(a), to_json(b));
  const auto round = forest_from_json(to_json(a));
  for (int i = 0; i < 200; ++i) {
    const std::vector<double> x{rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 1)};
    EXPECT_EQ(round.score(x), a.score(x));
  }
  const std::string path = ::testing::TempDir() + "forest.json";
  save_forest(a, path);
  EXPECT_EQ(to_json(load_forest(path)), to_json(a));
}

TEST(Forest, Errors) {
  EXPECT_THROW(train_forest({{1.0}, {2.0}}, {true, true}, {"x"}, {}), InvalidArgument);
  ForestParams p;
  p.n_trees = 0;
  EXPECT_THROW(train_forest({{1.0}, {2.0}}, {true, false}, {"x"}, p), InvalidArgument);
  EXPECT_THROW(forest_from_json(nlohmann::json{{"version", 99}}), ParseError);
}

TEST(Classify, VoteShareAndTie) {
  Forest f;
  f.feature_names = AnomalyFeatureVector::names({"bathroom", "bedroom", "hallway", "kitchen"});
  DecisionTree yes, no;
  yes.nodes.push_back({-1, 0.0, -1, -1, true});
  no.nodes.push_back({-1, 0.0, -1, -1, false});
  const auto x = extract_features({}, 10.0, apartment());
  f.trees = {no, no};
  EXPECT_FALSE(classify_anomaly(f, x).anomalous);
  EXPECT_EQ(classify_anomaly(f, x).score, 0.0);
  f.trees = {yes, no};
  EXPECT_TRUE(classify_anomaly(f, x).anomalous);
  EXPECT_EQ(classify_anomaly(f, x).score, 0.5);
}

TEST(Classify, CorpusForestBeatsDwellRule) {
  const auto cfg = scenario::load_scenario_file(HOMEBOT_SOURCE_DIR "/scenarios/bathroom_fall.json");
  const auto train = scenario::generate_corpus(cfg.map, cfg.detection.corpus, cfg.detection.features);
  auto held_cfg = cfg.detection.corpus;
  held_cfg.seed = 99;
  const auto held = scenario::generate_corpus(cfg.map, held_cfg, cfg.detection.features);
  const auto forest = train_forest(train, cfg.detection.forest);
  int forest_ok = 0, rule_ok = 0;
  for (const auto& s : held) {
    forest_ok += (forest.score(s.features.values()) >= 0.5) == s.anomalous;
    rule_ok += dwell_rule_baseline(s.features) == s.anomalous;
  }
  EXPECT_GE(forest_ok, rule_ok);

  // A long motionless dwell on the bedroom mat reads as a bedroom anomaly.
  std::vector<sensors::SensorEvent> events;
  for (int k = 1; k <= 3000; ++k) events.push_back(event(k * 0.1, "p_bedroom", world::SensorKind::Pressure));
  FeatureConfig fc = cfg.detection.features;
  const auto verdict = classify_anomaly(forest, extract_features(events, 300.0, cfg.map, fc));
  EXPECT_TRUE(verdict.anomalous);
  EXPECT_EQ(verdict.room, "bedroom");
}

TEST(Fallen, HumanCluster) {
  const sensors::ScanCluster c{world::Vec2(1, 1), 1.7, 0.35, 33.0, false, "a"};
  const auto cands = detect_fallen({c});
  ASSERT_EQ(cands.size(), 1u);
  EXPECT_TRUE(cands[0].size_ok);
  EXPECT_TRUE(cands[0].temperature_ok);
  EXPECT_GT(cands[0].confidence, 0.0);
}

TEST(Fallen, KettleRejected) {
  const sensors::ScanCluster kettle{world::Vec2(1, 1), 0.2, 0.2, 60.0, false, "kettle"};
  EXPECT_TRUE(detect_fallen({kettle}).empty());
}

TEST(Fallen, GridMatchesPredicate) {
  const FallenThresholds t;
  std::vector<double> extents, temps;
  for (int i = 0; i <= 60; ++i) extents.push_back(i * 0.05);
  for (int i = 0; i <= 60; ++i) temps.push_back(15.0 + i * 0.5);
  for (double e : {t.size_min, t.size_max, std::nextafter(t.size_min, 0.0), std::nextafter(t.size_max, 9.0)})
    extents.push_back(e);
  for (double T : {t.temp_min, t.temp_max, std::nextafter(t.temp_min, 0.0), std::nextafter(t.temp_max, 99.0)})
    temps.push_back(T);
  for (bool known : {false, true})
    for (double e : extents)
      for (double T : temps) {
        const sensors::ScanCluster c{world::Vec2::Zero(), e, 0.3, T, known, ""};
        const bool want = !known && e >= t.size_min && e <= t.size_max && T >= t.temp_min && T <= t.temp_max;
        ASSERT_EQ(is_fallen_person(c, t), want) << e << " " << T << " " << known;
        ASSERT_EQ(detect_fallen({c}, t).size(), want ? 1u : 0u);
      }
}

namespace {

std::vector<ShoulderSample> shoulder_track(double drop, double seconds, world::Vec2 displacement) {
  std::vector<ShoulderSample> track;
  for (int i = 0; i <= 10; ++i) {
    const double f = i / 10.0;
    track.push_back({f * seconds, 1.45 - drop * f, displacement * f});
  }
  return track;
}

}  // namespace

TEST(FallDirection, PushedMannequin) {
  EXPECT_EQ(fall_direction(shoulder_track(1.0, 1.0, {0.8, 0.05})), FallVerdict::Forward);
  EXPECT_EQ(fall_direction(shoulder_track(1.0, 1.0, {-0.8, 0.1})), FallVerdict::Backward);
  EXPECT_EQ(fall_direction(shoulder_track(1.0, 1.0, {0.1, 0.8})), FallVerdict::Left);
  EXPECT_EQ(fall_direction(shoulder_track(1.0, 1.0, {0.0, -0.8})), FallVerdict::Right);
}

TEST(FallDirection, BendingIsNoFall) {
  EXPECT_EQ(fall_direction(shoulder_track(0.3, 3.0, {0.2, 0.0})), FallVerdict::NoFall);
  EXPECT_EQ(fall_direction(shoulder_track(0.9, 10.0, {0.2, 0.0})), FallVerdict::NoFall);
}

TEST(FallDirection, QuadrantBoundary) {
  EXPECT_EQ(fall_direction(shoulder_track(0.6, 1.0, {0.5, 0.5})), FallVerdict::Forward);
  EXPECT_THROW(fall_direction({{0.0, 1.0, {}}}), InvalidArgument);
}
