#include "homebot/scenario/trials.hpp"

#include <cmath>
#include <numeric>

#include "homebot/error.hpp"
#include "homebot/world/world.hpp"

namespace homebot::scenario {

using world::Vec2;

namespace {

constexpr double kDt = 0.1;

world::WorldState breathing_world(double interval, double cv, std::uint64_t seed) {
  world::WorldState s;
  s.map = world::HomeMap(40, 40, 0.1);
  world::AgentState a;
  a.id = "participant";
  a.position = Vec2(2.0, 2.0);
  a.breathing_interval = interval;
  a.breathing_cv = cv;
  a.next_exhale = interval;
  s.agents.push_back(a);
  s.rng = Rng(seed);
  return s;
}

// Averages sensor readings over a fixed period before handing them on.
struct Averager {
  double period;
  double sum = 0.0;
  int count = 0;
  double started = 0.0;
  std::optional<sensors::GasSample> push(const sensors::GasSample& s) {
    if (count == 0) started = s.timestamp - kDt;
    sum += s.reading;
    ++count;
    if (s.timestamp - started + 1e-9 < period) return std::nullopt;
    sensors::GasSample out{s.timestamp, sum / count};
    sum = 0.0;
    count = 0;
    return out;
  }
};

}  // namespace

double BreathTrialResult::mean_latency() const {
  if (latencies.empty()) return 0.0;
  return std::accumulate(latencies.begin(), latencies.end(), 0.0) / static_cast<double>(latencies.size());
}

BreathTrialResult run_breath_trials(const BreathTrialConfig& cfg) {
  if (cfg.participants < 1 || cfg.cycles < 1) throw InvalidArgument("breath trials need participants and cycles");
  if (cfg.move_speed <= 0.0) throw InvalidArgument("breath trials need a positive move speed");
  BreathTrialResult result;
  const double travel = std::abs(cfg.far_distance - cfg.close_distance) / cfg.move_speed;
  const double segment = travel + cfg.hold;
  const double session = cfg.lead_in + cfg.cycles * (2.0 * segment - cfg.hold + cfg.withdraw);

  for (int p = 0; p < cfg.participants; ++p) {
    Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(p)));
    const double interval = rng.uniform(3.0, 5.0);
    auto state = breathing_world(interval, 0.1, rng.next());
    sensors::GasSensor sensor(cfg.gas);
    detection::BreathDetector detector(cfg.detector);
    Averager avg{cfg.read_period};

    // Truth changes at the start of every approach and every withdrawal.
    std::vector<std::pair<double, detection::Presence>> changes;
    double t0 = cfg.lead_in;
    for (int c = 0; c < cfg.cycles; ++c) {
      changes.emplace_back(t0, detection::Presence::Close);
      changes.emplace_back(t0 + segment, detection::Presence::Far);
      t0 += segment + travel + cfg.withdraw;
    }
    auto distance_at = [&](double t) {
      double d = cfg.far_distance;
      for (const auto& [start, to] : changes) {
        if (t < start) break;
        const double moved = std::min(1.0, (t - start) / travel);
        d = to == detection::Presence::Close ? cfg.far_distance + (cfg.close_distance - cfg.far_distance) * moved
                                             : cfg.close_distance + (cfg.far_distance - cfg.close_distance) * moved;
      }
      return d;
    };

    std::vector<detection::BreathTransition> seen;
    const auto steps = static_cast<std::uint64_t>(std::llround(session / kDt));
    for (std::uint64_t k = 1; k <= steps; ++k) {
      state = world::step_world(std::move(state), kDt);
      state.clock = static_cast<double>(k) * kDt;
      const Vec2 face = state.agents.front().face_position();
      const Vec2 probe = face + Vec2(distance_at(state.clock), 0.0);
      const auto raw = sensor.sample(state, probe, kDt, &rng);
      if (auto averaged = avg.push(raw))
        if (auto tr = detector.update(*averaged)) seen.push_back(*tr);
    }

    for (std::size_t i = 0; i < changes.size(); ++i) {
      const double start = changes[i].first;
      const double end = i + 1 < changes.size() ? changes[i + 1].first : session;
      ++result.changes;
      bool matched = false;
      for (const auto& tr : seen) {
        if (tr.timestamp < start || tr.timestamp >= end) continue;
        if (tr.to != changes[i].second) continue;
        const double latency = tr.timestamp - start;
        result.latencies.push_back(latency);
        result.max_latency = std::max(result.max_latency, latency);
        matched = true;
        break;
      }
      if (!matched) {
        ++result.undetected;
        result.max_latency = std::max(result.max_latency, end - start);
      }
    }
  }
  return result;
}

detection::Side run_side_trial(const SideTrialConfig& cfg, std::uint64_t seed) {
  if (cfg.dwell <= 0.0 || cfg.duration <= 0.0) throw InvalidArgument("side trial needs positive dwell and duration");
  Rng rng(seed);
  auto state = breathing_world(rng.uniform(3.0, 5.0), 0.1, rng.next());
  // The robot faces +x; its left is +y. The face sits forward_offset ahead
  // and lateral_offset to the left of the sensor's rest position.
  const Vec2 face = state.agents.front().face_position();
  const Vec2 rest = face - Vec2(cfg.forward_offset, cfg.lateral_offset);
  constexpr double bearing = 0.5;  // pan angle reported for each side, radians

  sensors::GasSensor sensor(cfg.gas);
  detection::BreathDetector detector;
  Averager avg{1.0};
  std::vector<detection::BreathTransition> fast;
  std::vector<detection::PanSample> pan;
  const auto settle_steps = static_cast<std::uint64_t>(std::llround(cfg.settle / kDt));
  const auto total_steps = settle_steps + static_cast<std::uint64_t>(std::llround(cfg.duration / kDt));
  const auto dwell_steps = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(cfg.dwell / kDt)));
  double dwell_rise = 0.0;
  double previous = cfg.gas.baseline;
  for (std::uint64_t k = 1; k <= total_steps; ++k) {
    state = world::step_world(std::move(state), kDt);
    state.clock = static_cast<double>(k) * kDt;
    bool left = true;
    if (k > settle_steps) left = ((k - settle_steps - 1) / dwell_steps) % 2 == 0;
    const Vec2 probe = rest + Vec2(0.0, left ? cfg.pan_offset : -cfg.pan_offset);
    const auto raw = sensor.sample(state, probe, kDt, &rng);
    if (auto averaged = avg.push(raw))
      if (auto tr = detector.update(*averaged)) fast.push_back(*tr);
    if (k <= settle_steps) {
      previous = raw.reading;
      continue;
    }
    dwell_rise += std::max(0.0, raw.reading - previous);
    previous = raw.reading;
    if ((k - settle_steps) % dwell_steps == 0) {
      pan.push_back({left ? bearing : -bearing, dwell_rise});
      dwell_rise = 0.0;
    }
  }
  // Sum the per-dwell rise for each bearing before fusing.
  double sum_left = 0.0, sum_right = 0.0;
  for (const auto& s : pan) (s.bearing > 0 ? sum_left : sum_right) += s.reading;
  const std::vector<detection::PanSample> totals{{bearing, sum_left}, {-bearing, sum_right}};
  auto fusion = cfg.fusion;
  fusion.now = state.clock;
  return detection::fuse_presence(fast, {}, totals, fusion).side;
}

std::vector<PhotoTrial> photo_trials() {
  std::vector<PhotoTrial> trials;
  for (int i = 0; i < 10; ++i) {
    PhotoTrial t;
    const bool swap = i % 2 == 1;
    const double near = i < 5 ? 2.0 : 1.5;
    t.distance = swap ? std::array<double, 2>{3.0, near} : std::array<double, 2>{near, 3.0};
    t.expected = swap ? 1 : 0;
    trials.push_back(t);
  }
  for (int i = 0; i < 10; ++i) {
    PhotoTrial t;
    t.height_trial = true;
    const double delta = i < 5 ? 0.15 : 0.075;
    const bool swap = i % 2 == 1;
    t.distance = {2.0, 2.0};
    t.height = swap ? std::array<double, 2>{1.2 - delta, 1.2 + delta} : std::array<double, 2>{1.2 + delta, 1.2 - delta};
    t.expected = swap ? 1 : 0;
    trials.push_back(t);
  }
  return trials;
}

bool run_photo_trial(const PhotoTrial& trial, const PhotoNoise& noise, std::uint64_t seed,
                     const planning::HelpfulnessParams& params) {
  Rng rng(seed);
  const sensors::RobotPose pose{Vec2::Zero(), 0.0};
  struct Seen {
    planning::HelpNode node;
    double height;
    double distance;
    int index;
  };
  std::vector<Seen> seen;
  for (int i = 0; i < 2; ++i) {
    const double lateral = (i == 0 ? 0.5 : -0.5) * trial.separation;
    const double d = std::hypot(trial.distance[static_cast<std::size_t>(i)], lateral);
    sensors::PerceivedFace f;
    f.agent_id = "photo" + std::to_string(i);
    f.bearing = std::atan2(lateral, trial.distance[static_cast<std::size_t>(i)]);
    f.apparent_width = params.face_width_prior / d;
    f.face_center_height = trial.height[static_cast<std::size_t>(i)];
    const double hn = rng.normal(0.0, noise.height_sd);
    const double wn = rng.normal(0.0, noise.width_sd);
    if (noise.enabled) {
      f.face_center_height += hn;
      f.apparent_width *= std::max(0.05, 1.0 + wn);
    }
    const auto node = planning::help_node_from_face(f, pose, params);
    seen.push_back({node, f.face_center_height, params.face_width_prior / f.apparent_width, i});
  }
  std::stable_sort(seen.begin(), seen.end(), [](const Seen& a, const Seen& b) {
    if (a.node.reward != b.node.reward) return a.node.reward > b.node.reward;
    if (a.height != b.height) return a.height > b.height;
    return a.distance < b.distance;
  });
  std::vector<planning::HelpNode> nodes;
  for (const auto& s : seen) nodes.push_back(s.node);
  const std::size_t n = nodes.size();
  planning::CostMatrix cost(n + 1, std::vector<double>(n + 1, 0.0));
  std::vector<Vec2> pts{pose.position};
  for (const auto& node : nodes) pts.push_back(node.position);
  for (std::size_t a = 0; a <= n; ++a)
    for (std::size_t b = 0; b <= n; ++b) cost[a][b] = (pts[a] - pts[b]).norm() / 0.3;
  const auto plan = planning::plan_tour(nodes, cost, 300.0);
  if (plan.order.empty()) return false;
  return seen[plan.order.front()].index == trial.expected;
}

}  // namespace homebot::scenario
