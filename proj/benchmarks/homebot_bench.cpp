#include <benchmark/benchmark.h>

#include "generators.hpp"
#include "homebot/detection/anomaly.hpp"
#include "homebot/detection/breath.hpp"
#include "homebot/detection/trend.hpp"
#include "homebot/motion/trajectory.hpp"
#include "homebot/planning/navgrid.hpp"
#include "homebot/planning/tour.hpp"
#include "homebot/scenario/config.hpp"
#include "homebot/scenario/corpus.hpp"
#include "homebot/scenario/runner.hpp"

using namespace homebot;

namespace {

const std::string kScenarios = HOMEBOT_SOURCE_DIR "/scenarios/";

void BM_AstarApartment(benchmark::State& state) {
  const auto cfg = scenario::load_scenario_file(kScenarios + "dispatch_batch.json");
  const planning::NavGrid grid(cfg.map);
  const auto from = cfg.map.cell_of(cfg.robot_home);
  const auto to = cfg.map.cell_of(scenario::room_anchor(cfg.map, "bedroom"));
  for (auto _ : state) benchmark::DoNotOptimize(planning::astar(grid, from, to));
}
BENCHMARK(BM_AstarApartment);

void BM_PlanTour(benchmark::State& state) {
  Rng rng(1);
  auto in = gen::random_tour_instance(rng, static_cast<int>(state.range(0)));
  in.budget = 30.0;
  for (auto _ : state) benchmark::DoNotOptimize(planning::plan_tour(in.nodes, in.cost, in.budget));
}
BENCHMARK(BM_PlanTour)->Arg(4)->Arg(8)->Arg(16);

void BM_BruteForceTour(benchmark::State& state) {
  Rng rng(1);
  auto in = gen::random_tour_instance(rng, static_cast<int>(state.range(0)));
  in.budget = 30.0;
  for (auto _ : state) benchmark::DoNotOptimize(planning::brute_force_tour(in.nodes, in.cost, in.budget));
}
BENCHMARK(BM_BruteForceTour)->Arg(4)->Arg(8);

void BM_Optimize(benchmark::State& state) {
  const auto seed = motion::seed_straight(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0), static_cast<int>(state.range(0)));
  const motion::PlayfulParams p;
  for (auto _ : state) benchmark::DoNotOptimize(motion::optimize(seed, p));
}
BENCHMARK(BM_Optimize)->Arg(30)->Arg(100);

void BM_TrendFilter(benchmark::State& state) {
  const auto signal = gen::rise_then_decay(100.0, 40.0, 10.0, 30.0, 0.5).first;
  for (auto _ : state) benchmark::DoNotOptimize(detection::trend_filter(signal));
}
BENCHMARK(BM_TrendFilter);

void BM_BreathStep(benchmark::State& state) {
  Rng rng(3);
  auto s = detection::BreathDetectorState::initial(100.0, 1.0);
  double t = 0.0;
  for (auto _ : state) {
    t += 1.0;
    s = detection::breath_step(s, {t, 100.0 + rng.normal(0.0, 1.0)}).first;
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_BreathStep);

void BM_TrainForest(benchmark::State& state) {
  const auto cfg = scenario::load_scenario_file(kScenarios + "bathroom_fall.json");
  const auto corpus = scenario::generate_corpus(cfg.map, cfg.detection.corpus, cfg.detection.features);
  for (auto _ : state) benchmark::DoNotOptimize(detection::train_forest(corpus, cfg.detection.forest));
}
BENCHMARK(BM_TrainForest)->Unit(benchmark::kMillisecond);

void BM_RunScenario(benchmark::State& state) {
  const auto cfg = scenario::load_scenario_file(kScenarios + "bathroom_fall.json");
  const auto forest = scenario::scenario_forest(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(scenario::run_scenario(cfg, forest));
}
BENCHMARK(BM_RunScenario)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
