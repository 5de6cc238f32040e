#include "homebot/scenario/runner.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <atomic>
#include <limits>
#include <set>
#include <map>
#include <numbers>
#include <thread>

#include "homebot/detection/fallen.hpp"
#include "homebot/error.hpp"
#include "homebot/planning/navgrid.hpp"
#include "homebot/planning/tour.hpp"
#include "homebot/scenario/corpus.hpp"
#include "homebot/scenario/dialogue.hpp"
#include "homebot/triage/triage.hpp"

namespace homebot::scenario {

using nlohmann::json;
using world::Cell;

namespace {

constexpr double kPi = std::numbers::pi;

double wrap(double a) {
  while (a > kPi) a -= 2.0 * kPi;
  while (a <= -kPi) a += 2.0 * kPi;
  return a;
}

json point(const Vec2& p) { return json::array({std::round(p.x() * 1e4) / 1e4, std::round(p.y() * 1e4) / 1e4}); }

// Rotates in place toward the next waypoint, then drives straight to it.
struct RouteFollower {
  std::vector<Vec2> waypoints;
  std::size_t cursor = 0;

  [[nodiscard]] bool active() const { return cursor < waypoints.size(); }
  void set(std::vector<Vec2> w) {
    waypoints = std::move(w);
    cursor = 0;
  }
  void clear() { set({}); }

  void step(world::RobotState& r, double dt) {
    double remaining = dt;
    while (remaining > 1e-12 && cursor < waypoints.size()) {
      const Vec2 d = waypoints[cursor] - r.position;
      const double dist = d.norm();
      if (dist < 1e-9) {
        ++cursor;
        continue;
      }
      const double err = wrap(std::atan2(d.y(), d.x()) - r.heading);
      if (std::abs(err) > 1e-9) {
        const double turn = r.turn_rate * remaining;
        if (std::abs(err) <= turn) {
          r.heading = wrap(r.heading + err);
          remaining -= std::abs(err) / r.turn_rate;
        } else {
          r.heading = wrap(r.heading + std::copysign(turn, err));
          remaining = 0.0;
        }
        continue;
      }
      const double reach = r.speed * remaining;
      if (dist <= reach) {
        r.position = waypoints[cursor];
        remaining -= dist / r.speed;
        ++cursor;
      } else {
        r.position += d * (reach / dist);
        remaining = 0.0;
      }
    }
  }
};

Cell nearest_free(const world::HomeMap& map, const Vec2& p) {
  const Cell c = map.cell_of(p);
  if (map.is_free(c)) return c;
  std::optional<Cell> best;
  double best_d = 0.0;
  for (int y = 0; y < map.height(); ++y)
    for (int x = 0; x < map.width(); ++x) {
      if (!map.is_free({x, y})) continue;
      const double d = (map.center_of({x, y}) - p).squaredNorm();
      if (!best || d < best_d) {
        best = Cell{x, y};
        best_d = d;
      }
    }
  if (!best) throw Error("map has no free cell");
  return *best;
}

enum class Phase { Monitoring, Dispatching, Dialogue, Triage, SeekingHelp, Returning, Done };

class Simulation {
 public:
  Simulation(const ScenarioConfig& cfg, const detection::Forest& forest)
      : cfg_(cfg),
        forest_(forest),
        grid_(cfg.map),
        sense_rng_(mix_seed(cfg.seed, 2)),
        dialogue_rng_(mix_seed(cfg.seed, 3)),
        triage_rng_(mix_seed(cfg.seed, 4)) {
    state_.map = cfg.map;
    state_.agents = cfg.agents;
    state_.props = cfg.props;
    state_.rng = Rng(mix_seed(cfg.seed, 1));
    state_.robot.position = cfg.robot_home;
    state_.robot.heading = cfg.robot_heading;
    state_.robot.home_position = cfg.robot_home;
    state_.robot.home_heading = cfg.robot_heading;
    state_.robot.speed = cfg.motion.speed;
    state_.robot.turn_rate = cfg.motion.turn_rate;
    for (const auto& s : cfg.map.sensors()) sensor_value_[s.id] = false;
  }

  RunResult run() {
    RunResult result;
    try {
      log_.add(0.0, "scenario", "start",
               {{"name", cfg_.name}, {"seed", cfg_.seed}, {"duration", cfg_.duration}, {"dt", cfg_.dt}});
      log_.add(0.0, "scenario", "robot_mode", {{"mode", "idle"}});
      const auto steps = static_cast<std::uint64_t>(std::llround(cfg_.duration / cfg_.dt));
      period_ticks_ = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(cfg_.detection.classify_period / cfg_.dt)));
      for (std::uint64_t k = 1; k <= steps; ++k) tick(k);
      log_.add(state_.clock, "scenario", "end", {{"robot_mode", world::to_string(state_.robot.mode)}});
    } catch (const std::exception& e) {
      result.status = 2;
      result.error = e.what();
      log_.add(state_.clock, "scenario", "error", {{"message", e.what()}});
    }
    result.metrics = compute_metrics(log_.records());
    result.log = std::move(log_);
    return result;
  }

 private:
  double now() const { return state_.clock; }

  void set_mode(world::RobotMode m) {
    if (state_.robot.mode == m) return;
    state_.robot.mode = m;
    log_.add(now(), "scenario", "robot_mode", {{"mode", world::to_string(m)}});
  }

  bool night() const {
    return detection::time_bucket(cfg_.start_time_of_day + now()) == detection::TimeBucket::Night;
  }

  void tick(std::uint64_t k) {
    std::vector<std::pair<bool, bool>> before;
    for (const auto& a : state_.agents) before.emplace_back(a.fallen, a.away);
    state_ = world::step_world(std::move(state_), cfg_.dt);
    state_.clock = static_cast<double>(k) * cfg_.dt;
    for (std::size_t i = 0; i < state_.agents.size(); ++i) {
      const auto& a = state_.agents[i];
      if (a.fallen && !before[i].first) {
        log_.add(now(), "world", "agent_fell", {{"agent", a.id}, {"position", point(a.position)},
                                                {"direction", world::to_string(a.fall_direction)}});
        log_.add(now(), "scenario", "ground_truth", {{"kind", "incident"}, {"what", "fall"}, {"agent", a.id}});
      }
      if (a.away != before[i].second) {
        log_.add(now(), "world", a.away ? "agent_exit" : "agent_enter", {{"agent", a.id}});
        if (a.away && night())
          log_.add(now(), "scenario", "ground_truth", {{"kind", "incident"}, {"what", "night_exit"}, {"agent", a.id}});
      }
    }
    sense_environment();
    for (const auto& e : state_.step_exhalations)
      if (e.agent_id == triage_agent_) exhale_times_.push_back(e.time);

    switch (phase_) {
      case Phase::Monitoring:
        if (k % period_ticks_ == 0) monitor();
        break;
      case Phase::Dispatching: dispatching(); break;
      case Phase::Dialogue: dialogue(); break;
      case Phase::Triage: triage_step(); break;
      case Phase::SeekingHelp: seek_help(); break;
      case Phase::Returning: returning(); break;
      case Phase::Done: break;
    }
  }

  void sense_environment() {
    const auto events = sensors::sample_environment_sensors(state_);
    std::map<std::string, bool> current;
    for (const auto& e : events) {
      if (e.kind == world::SensorKind::Contact) {
        log_.add(now(), "sensors", "sensor", {{"id", e.sensor_id}, {"kind", "contact"}, {"value", e.value}});
        sensor_value_[e.sensor_id] = e.value;
      } else {
        current[e.sensor_id] = e.value;
      }
      window_.push_back(e);
    }
    for (const auto& s : cfg_.map.sensors()) {
      if (s.kind == world::SensorKind::Contact) continue;
      const bool v = current.count(s.id) && current[s.id];
      if (v != sensor_value_[s.id]) {
        sensor_value_[s.id] = v;
        log_.add(now(), "sensors", "sensor", {{"id", s.id}, {"kind", world::to_string(s.kind)}, {"value", v}});
      }
    }
    const double horizon = now() - cfg_.detection.features.window;
    while (!window_.empty() && window_.front().timestamp <= horizon) window_.pop_front();
  }

  // --- anomaly monitoring -------------------------------------------------

  void monitor() {
    if (now() < rearm_at_ || now() < cfg_.detection.corpus.warmup) return;
    const std::vector<sensors::SensorEvent> events(window_.begin(), window_.end());
    const auto f = detection::extract_features(events, now(), cfg_.map, cfg_.detection.features);
    const auto verdict = detection::classify_anomaly(forest_, f);
    if (verdict.anomalous != last_verdict_) {
      log_.add(now(), "detection", "verdict",
               {{"anomalous", verdict.anomalous}, {"room", verdict.room}, {"score", verdict.score},
                {"bucket", detection::to_string(f.bucket)}});
      last_verdict_ = verdict.anomalous;
    }
    streak_ = verdict.anomalous ? streak_ + 1 : 0;
    if (streak_ < cfg_.detection.confirm_count) return;
    streak_ = 0;
    log_.add(now(), "detection", "anomaly", {{"room", verdict.room}, {"score", verdict.score}});
    start_dispatch(verdict.room);
  }

  void start_dispatch(const std::string& room) {
    search_rooms_.clear();
    if (cfg_.map.find_room(room)) search_rooms_.push_back(room);
    std::vector<std::pair<double, std::string>> others;
    const Cell here = cfg_.map.cell_of(state_.robot.position);
    for (const auto& r : cfg_.map.rooms()) {
      if (r.name == room) continue;
      const auto path = planning::astar(grid_, here, cfg_.map.cell_of(room_anchor(cfg_.map, r.name)));
      if (path) others.emplace_back(path->total_cost(), r.name);
    }
    std::sort(others.begin(), others.end());
    for (auto& o : others) search_rooms_.push_back(o.second);
    dispatch_room_ = room;
    dispatch_time_ = now();
    locked_.reset();
    phase_ = Phase::Dispatching;
    set_mode(world::RobotMode::Dispatching);
    const Vec2 goal = room_anchor(cfg_.map, search_rooms_.front());
    route_.set(walking_route(grid_, cfg_.map, state_.robot.position, goal));
    log_.add(now(), "planning", "dispatch",
             {{"room", room}, {"goal", point(goal)}, {"waypoints", route_.waypoints.size()},
              {"speed", cfg_.motion.speed}});
  }

  std::vector<Vec2> approach_route(const Vec2& target) {
    const double want = cfg_.planning.approach_distance;
    const Cell here = cfg_.map.cell_of(state_.robot.position);
    std::optional<std::pair<double, Cell>> best;
    const int r = static_cast<int>(std::ceil((want + 0.3) / cfg_.map.cell_size()));
    const Cell tc = cfg_.map.cell_of(target);
    for (int dy = -r; dy <= r; ++dy)
      for (int dx = -r; dx <= r; ++dx) {
        const Cell c{tc.x + dx, tc.y + dy};
        if (!grid_.passable(c)) continue;
        const double d = (cfg_.map.center_of(c) - target).norm();
        if (d < want - 0.15 || d > want + 0.25) continue;
        if (!sensors::line_of_sight(cfg_.map, cfg_.map.center_of(c), target)) continue;
        const auto path = planning::astar(grid_, here, c);
        if (!path) continue;
        const double cost = path->total_cost() + std::abs(d - want);
        if (!best || cost < best->first - 1e-12) best = std::make_pair(cost, c);
      }
    const Cell goal = best ? best->second : nearest_free(cfg_.map, target);
    return walking_route(grid_, cfg_.map, state_.robot.position, cfg_.map.center_of(goal));
  }

  void dispatching() {
    route_.step(state_.robot, cfg_.dt);
    if (!locked_) {
      const auto clusters = sensors::sample_laser_clusters(state_, pose(), cfg_.detection.laser, &sense_rng_);
      const auto candidates = detection::detect_fallen(clusters, cfg_.detection.fallen);
      if (!candidates.empty()) {
        auto best = std::max_element(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
          return a.confidence < b.confidence;
        });
        double extent = 0.0;
        for (const auto& c : clusters)
          if ((c.centroid - best->position).norm() < 1e-9) extent = c.major_extent;
        locked_ = *best;
        locked_extent_ = extent;
        log_.add(now(), "detection", "fallen_candidate",
                 {{"position", point(best->position)}, {"confidence", best->confidence}, {"extent", extent}});
        route_.set(approach_route(best->position));
      }
    }
    if (route_.active()) return;
    if (!locked_ && search_rooms_.size() > 1) {
      search_rooms_.erase(search_rooms_.begin());
      route_.set(walking_route(grid_, cfg_.map, state_.robot.position, room_anchor(cfg_.map, search_rooms_.front())));
      log_.add(now(), "planning", "search", {{"room", search_rooms_.front()}});
      return;
    }
    arrive();
  }

  sensors::RobotPose pose() const { return {state_.robot.position, state_.robot.heading}; }

  void arrive() {
    json fields{{"room", dispatch_room_}, {"position", point(state_.robot.position)}};
    const world::AgentState* person = nullptr;
    if (locked_) {
      double best = 1.5;
      for (const auto& a : state_.agents) {
        if (a.away) continue;
        const double d = (a.position - locked_->position).norm();
        if (d < best) {
          best = d;
          person = &a;
        }
      }
    }
    fields["person_found"] = person != nullptr;
    log_.add(now(), "planning", "arrival", fields);
    if (!person) {
      log_.add(now(), "planning", "no_person", {{"rooms_searched", search_rooms_.size()}});
      go_home();
      return;
    }
    person_ = person->id;
    phase_ = Phase::Dialogue;
    set_mode(world::RobotMode::Dialogue);
    log_.add(now(), "dialogue", "ask", {{"question", "Should I call emergency services?"}});
    outcome_ = dialogue_exchange(*person, cfg_.dialogue.accuracy, cfg_.dialogue.timeout,
                                 dialogue_rng_, cfg_.triage.thresholds);
    dialogue_done_at_ = now() + outcome_.elapsed;
  }

  void dialogue() {
    if (now() + 1e-9 < dialogue_done_at_) return;
    if (outcome_.spoken != Utterance::Silent)
      log_.add(now(), "dialogue", "response", {{"spoken", to_string(outcome_.spoken)}, {"heard", to_string(outcome_.heard)}});
    else
      log_.add(now(), "dialogue", "timeout", {{"after", cfg_.dialogue.timeout}});
    log_.add(now(), "dialogue", "decision",
             {{"decision", to_string(outcome_.decision)}, {"ideal", to_string(outcome_.ideal)},
              {"spoken", to_string(outcome_.spoken)}, {"heard", to_string(outcome_.heard)}});
    if (outcome_.decision == Decision::StandDown) {
      go_home();
      return;
    }
    log_.add(now(), "dialogue", "ems_call", {{"reason", to_string(outcome_.decision)}});
    rearm_at_ = std::numeric_limits<double>::infinity();
    const auto* p = state_.find_agent(person_);
    const bool lying = locked_extent_ >= 1.0;
    if (p && (outcome_.decision == Decision::TimeoutCall || lying)) {
      phase_ = Phase::Triage;
      set_mode(world::RobotMode::Triage);
      triage_agent_ = person_;
      triage_start_ = now();
      exhale_times_.clear();
      log_.add(now(), "triage", "start", {{"agent", person_}, {"observation", cfg_.triage.observation}});
    } else {
      phase_ = Phase::Done;
      set_mode(world::RobotMode::Idle);
    }
  }

  void go_home() {
    phase_ = Phase::Returning;
    set_mode(world::RobotMode::Dispatching);
    route_.set(walking_route(grid_, cfg_.map, state_.robot.position, state_.robot.home_position));
    log_.add(now(), "planning", "return_home", {{"waypoints", route_.waypoints.size()}});
  }

  void returning() {
    route_.step(state_.robot, cfg_.dt);
    if (route_.active()) return;
    log_.add(now(), "planning", "home", json::object());
    phase_ = Phase::Monitoring;
    rearm_at_ = now() + cfg_.detection.rearm_delay;
    last_verdict_ = false;
    streak_ = 0;
    set_mode(world::RobotMode::Idle);
  }

  // --- triage --------------------------------------------------------------

  void triage_step() {
    if (now() + 1e-9 < triage_start_ + cfg_.triage.observation) return;
    const auto* a = state_.find_agent(triage_agent_);
    if (!a) throw Error("triage subject vanished");
    const auto& th = cfg_.triage.thresholds;
    const auto& nz = cfg_.triage.noise;
    Rng& rng = triage_rng_;
    const auto& v = a->vitals_truth;
    using namespace triage;

    const double blue_n = rng.normal(0.0, nz.blueness_sd);
    const double pitch_n = rng.normal(0.0, nz.pitch_sd_deg);
    const bool flip = rng.bernoulli(nz.orientation_confusion);
    double blueness = v.hand_blueness;
    double pitch = v.chin_pitch_deg;
    FaceOrientation orient = face_orientation_from_string(v.face_orientation);
    if (nz.enabled) {
      blueness = std::clamp(blueness + blue_n, 0.0, 1.0);
      pitch += pitch_n;
      if (flip) orient = orient == FaceOrientation::Side ? FaceOrientation::Front : FaceOrientation::Side;
    }
    std::vector<double> intervals;
    double carry = 0.0;
    for (std::size_t i = 1; i < exhale_times_.size(); ++i) {
      double gap = exhale_times_[i] - exhale_times_[i - 1];
      const double jitter = rng.normal(0.0, nz.interval_jitter);
      const bool missed = rng.bernoulli(nz.missed_breath);
      if (nz.enabled) {
        carry += std::max(0.2, gap * (1.0 + jitter));
        if (missed) continue;
        gap = carry;
        carry = 0.0;
      }
      intervals.push_back(gap);
    }
    const Breathing breathing =
        assess_breathing(intervals, coefficient_of_variation(intervals), cfg_.triage.observation, th);

    std::vector<RedObservation> track;
    const BleedLocation loc = bleed_location_from_string(v.bleeding_location);
    BleedLocation seen = loc;
    if (nz.enabled && loc != BleedLocation::None && rng.bernoulli(nz.region_confusion))
      seen = loc == BleedLocation::Body ? BleedLocation::LeftArm : BleedLocation::Body;
    const double onset = a->fall_time >= 0.0 ? a->fall_time : triage_start_;
    for (double t = triage_start_; t <= now() + 1e-9; t += 1.0) {
      double area = loc == BleedLocation::None ? 0.0 : v.bleeding_rate_cm2_s * std::max(0.0, t - onset) * 1e-4;
      const double n = rng.normal(0.0, nz.area_sd);
      if (nz.enabled) area = std::max(0.0, area + n);
      track.push_back({t, seen, area});
    }
    const BleedingVerdict bleed = assess_bleeding(track, th);
    const VitalsReport report =
        triage_report(assess_cyanosis(blueness, th), assess_airway(pitch, orient, th), breathing, bleed);

    BodyFrame frame;
    const Vec2 head_dir = world::fall_vector(a->heading, a->fall_direction);
    frame.face_center = a->face_position();
    if (nz.enabled) frame.face_center += Vec2(rng.normal(0.0, 0.015), rng.normal(0.0, 0.015));
    frame.body_axis = a->fallen ? Vec2(-head_dir) : Vec2(std::cos(a->heading), std::sin(a->heading));
    frame.face_up = a->fall_direction != world::FallDirection::Forward;
    json parts = json::array();
    for (const auto& p : locate_parts(frame)) parts.push_back({{"part", to_string(p.part)}, {"position", point(p.position)}});

    log_.add(now(), "triage", "report",
             {{"agent", a->id}, {"report", to_json(report)}, {"parts", parts}, {"breaths_observed", exhale_times_.size()}});
    log_.add(now(), "scenario", "ground_truth", {{"kind", "triage"}, {"agent", a->id}, {"report", to_json(true_vitals(v, th))}});
    triage_agent_.clear();

    const bool bystanders = std::any_of(state_.agents.begin(), state_.agents.end(),
                                        [&](const world::AgentState& o) { return o.id != a->id; });
    if (report.priority == Priority::Red && cfg_.planning.help_enabled && bystanders) {
      phase_ = Phase::SeekingHelp;
      set_mode(world::RobotMode::SeekingHelp);
      help_start_ = now();
      victim_ = a->id;
      scan_turned_ = 0.0;
      visited_anchors_.clear();
      route_.clear();
      log_.add(now(), "planning", "seek_help", {{"budget", cfg_.planning.help_budget}});
    } else {
      phase_ = Phase::Done;
      set_mode(world::RobotMode::Idle);
    }
  }

  // --- help seeking --------------------------------------------------------

  std::string true_best_helper() const {
    std::string best;
    double best_reward = -1.0, best_height = 0.0;
    for (const auto& a : state_.agents) {
      if (a.away || a.fallen || a.id == victim_) continue;
      sensors::PerceivedFace f;
      f.agent_id = a.id;
      const double d = std::max(1e-6, (a.face_position() - state_.robot.position).norm());
      f.apparent_width = a.face_width / d;
      f.face_center_height = a.face_height();
      const double r = planning::helpfulness(f, cfg_.planning.helpfulness).reward;
      if (r > best_reward + 1e-12 || (std::abs(r - best_reward) <= 1e-12 && f.face_center_height > best_height)) {
        best = a.id;
        best_reward = r;
        best_height = f.face_center_height;
      }
    }
    return best;
  }

  void seek_help() {
    const double elapsed = now() - help_start_;
    if (elapsed > cfg_.planning.help_budget) {
      log_.add(now(), "planning", "help_budget_exhausted", json::object());
      phase_ = Phase::Done;
      set_mode(world::RobotMode::Idle);
      return;
    }
    for (const auto& f : sensors::perceive_faces(state_, pose(), cfg_.planning.faces, &sense_rng_)) {
      if (f.agent_id == victim_) continue;
      auto node = planning::help_node_from_face(f, pose(), cfg_.planning.helpfulness);
      node.position = cfg_.map.center_of(nearest_free(cfg_.map, node.position));
      seen_[f.agent_id] = {node, f.face_center_height};
    }
    if (seen_.empty()) {
      scan();
      return;
    }
    std::vector<planning::HelpNode> nodes;
    for (const auto& [id, entry] : seen_) nodes.push_back(entry.first);
    // Equal rewards prefer the higher face.
    std::stable_sort(nodes.begin(), nodes.end(), [&](const auto& x, const auto& y) {
      if (x.reward != y.reward) return x.reward > y.reward;
      return seen_.at(x.id).second > seen_.at(y.id).second;
    });
    std::vector<Cell> cells;
    for (const auto& n : nodes) cells.push_back(cfg_.map.cell_of(n.position));
    const auto cost = planning::travel_time_matrix(grid_, cfg_.map.cell_of(state_.robot.position), cells, cfg_.motion.speed);
    planning::TourPlan base;
    base.budget = cfg_.planning.help_budget;
    const std::vector<std::string> asked(asked_.begin(), asked_.end());
    const auto plan = planning::replan(nodes, cost, base, elapsed, asked);
    if (!truth_logged_) {
      log_.add(now(), "scenario", "ground_truth", {{"kind", "help_target"}, {"agent", true_best_helper()}});
      truth_logged_ = true;
    }
    if (plan.ids != last_plan_ids_) {
      log_.add(now(), "planning", "tour_plan",
               {{"ids", plan.ids}, {"reward", plan.total_reward}, {"cost", plan.total_cost}, {"budget", plan.budget}});
      last_plan_ids_ = plan.ids;
    }
    if (plan.order.empty()) {
      if (asked_.empty()) {
        scan();
        return;
      }
      // Everyone on the tour has been asked: one last look around for
      // people not seen yet, then the tour is over.
      if (look_turned_ >= 2.0 * kPi) {
        log_.add(now(), "planning", "help_done", {{"asked", asked}});
        phase_ = Phase::Done;
        set_mode(world::RobotMode::Idle);
        return;
      }
      const double turn = state_.robot.turn_rate * cfg_.dt;
      state_.robot.heading = wrap(state_.robot.heading + turn);
      look_turned_ += turn;
      return;
    }
    const auto& target = nodes[plan.order.front()];
    if ((state_.robot.position - target.position).norm() <= cfg_.planning.help_reach) {
      log_.add(now(), "planning", "help_reached", {{"agent", target.id}, {"position", point(target.position)}});
      log_.add(now(), "dialogue", "ask_help", {{"agent", target.id}});
      asked_.insert(target.id);
      look_turned_ = 0.0;
      return;
    }
    if (target.id != goal_id_ || (target.position - goal_pos_).norm() > 0.3 || !route_.active()) {
      goal_id_ = target.id;
      goal_pos_ = target.position;
      route_.set(walking_route(grid_, cfg_.map, state_.robot.position, target.position));
    }
    route_.step(state_.robot, cfg_.dt);
  }

  // Rotates in place; after a full turn without faces, moves to the nearest
  // unvisited room anchor and scans again.
  void scan() {
    if (route_.active()) {
      route_.step(state_.robot, cfg_.dt);
      return;
    }
    if (scan_turned_ < 2.0 * kPi) {
      const double turn = state_.robot.turn_rate * cfg_.dt;
      state_.robot.heading = wrap(state_.robot.heading + turn);
      scan_turned_ += turn;
      return;
    }
    scan_turned_ = 0.0;
    std::optional<std::pair<double, std::string>> next;
    const Cell here = cfg_.map.cell_of(state_.robot.position);
    for (const auto& r : cfg_.map.rooms()) {
      if (visited_anchors_.count(r.name)) continue;
      const Vec2 anchor = room_anchor(cfg_.map, r.name);
      if ((anchor - state_.robot.position).norm() < 0.2) {
        visited_anchors_.insert(r.name);
        continue;
      }
      const auto path = planning::astar(grid_, here, cfg_.map.cell_of(anchor));
      if (path && (!next || path->total_cost() < next->first)) next = std::make_pair(path->total_cost(), r.name);
    }
    if (!next) {
      visited_anchors_.clear();
      return;
    }
    visited_anchors_.insert(next->second);
    route_.set(walking_route(grid_, cfg_.map, state_.robot.position, room_anchor(cfg_.map, next->second)));
    log_.add(now(), "planning", "search", {{"room", next->second}, {"purpose", "help"}});
  }

  const ScenarioConfig& cfg_;
  const detection::Forest& forest_;
  planning::NavGrid grid_;
  world::WorldState state_;
  EventLog log_;
  Rng sense_rng_, dialogue_rng_, triage_rng_;
  std::uint64_t period_ticks_ = 10;

  std::map<std::string, bool> sensor_value_;
  std::deque<sensors::SensorEvent> window_;
  Phase phase_ = Phase::Monitoring;
  bool last_verdict_ = false;
  int streak_ = 0;
  double rearm_at_ = 0.0;

  RouteFollower route_;
  std::vector<std::string> search_rooms_;
  std::string dispatch_room_;
  double dispatch_time_ = 0.0;
  std::optional<detection::FallenCandidate> locked_;
  double locked_extent_ = 0.0;

  std::string person_;
  DialogueOutcome outcome_;
  double dialogue_done_at_ = 0.0;

  std::string triage_agent_;
  double triage_start_ = 0.0;
  std::vector<double> exhale_times_;

  std::string victim_;
  double help_start_ = 0.0;
  double scan_turned_ = 0.0;
  std::set<std::string> visited_anchors_;
  std::map<std::string, std::pair<planning::HelpNode, double>> seen_;
  std::vector<std::string> last_plan_ids_;
  std::set<std::string> asked_;
  double look_turned_ = 0.0;
  bool truth_logged_ = false;
  std::string goal_id_;
  Vec2 goal_pos_ = Vec2::Zero();
};

}  // namespace

detection::Forest scenario_forest(const ScenarioConfig& cfg) {
  if (!cfg.detection.forest_model.empty()) return detection::load_forest(cfg.detection.forest_model);
  const auto corpus = generate_corpus(cfg.map, cfg.detection.corpus, cfg.detection.features);
  return detection::train_forest(corpus, cfg.detection.forest);
}

RunResult run_scenario(const ScenarioConfig& cfg, const detection::Forest& forest) {
  Simulation sim(cfg, forest);
  return sim.run();
}

RunResult run_scenario(const ScenarioConfig& cfg) {
  const auto forest = scenario_forest(cfg);
  return run_scenario(cfg, forest);
}

std::vector<RunResult> run_batch(const ScenarioConfig& cfg, int runs, unsigned threads) {
  if (runs < 1) throw InvalidArgument("run_batch: runs must be positive");
  const auto forest = scenario_forest(cfg);
  std::vector<ScenarioConfig> configs;
  for (int i = 0; i < runs; ++i) configs.push_back(with_seed(cfg, cfg.seed + static_cast<std::uint64_t>(i)));
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<RunResult> results(static_cast<std::size_t>(runs));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < runs; i = next++) results[static_cast<std::size_t>(i)] = run_scenario(configs[static_cast<std::size_t>(i)], forest);
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::min<unsigned>(threads, static_cast<unsigned>(runs)); ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return results;
}

}  // namespace homebot::scenario
