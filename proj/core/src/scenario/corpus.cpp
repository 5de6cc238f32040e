#include "homebot/scenario/corpus.hpp"

#include <cmath>
#include <deque>

#include "homebot/error.hpp"
#include "homebot/sensors/sensors.hpp"

namespace homebot::scenario {

using world::Cell;

std::vector<Vec2> walking_route(const planning::NavGrid& grid, const world::HomeMap& map, Vec2 from, Vec2 to) {
  const Cell a = map.cell_of(from);
  const Cell b = map.cell_of(to);
  if (a == b) return {to};
  if (!grid.passable(a) || !grid.passable(b)) throw InvalidArgument("walking_route: endpoint not on a free cell");
  const auto path = planning::astar(grid, a, b);
  if (!path) throw InvalidArgument("walking_route: no route between the endpoints");
  std::vector<Vec2> pts;
  const auto& cells = path->cells;
  for (std::size_t i = 1; i + 1 < cells.size(); ++i) {
    const int dx0 = cells[i].x - cells[i - 1].x, dy0 = cells[i].y - cells[i - 1].y;
    const int dx1 = cells[i + 1].x - cells[i].x, dy1 = cells[i + 1].y - cells[i].y;
    if (dx0 != dx1 || dy0 != dy1) pts.push_back(map.center_of(cells[i]));
  }
  pts.push_back(to);
  return pts;
}

Vec2 room_anchor(const world::HomeMap& map, const std::string& room) {
  const auto* r = map.find_room(room);
  if (!r) throw InvalidArgument("room_anchor: unknown room '" + room + "'");
  const double cx = 0.5 * (r->rect.min.x + r->rect.max.x);
  const double cy = 0.5 * (r->rect.min.y + r->rect.max.y);
  std::optional<Cell> best;
  double best_d = 0.0;
  for (int y = r->rect.min.y; y <= r->rect.max.y; ++y)
    for (int x = r->rect.min.x; x <= r->rect.max.x; ++x) {
      if (!map.is_free({x, y})) continue;
      const double d = (x - cx) * (x - cx) + (y - cy) * (y - cy);
      if (!best || d < best_d - 1e-12) {
        best = Cell{x, y};
        best_d = d;
      }
    }
  if (!best) throw InvalidArgument("room_anchor: room '" + room + "' has no free cell");
  return map.center_of(*best);
}

Vec2 random_room_point(const world::HomeMap& map, const std::string& room, Rng& rng) {
  const auto* r = map.find_room(room);
  if (!r) throw InvalidArgument("random_room_point: unknown room '" + room + "'");
  std::vector<Cell> cells;
  for (int y = r->rect.min.y; y <= r->rect.max.y; ++y)
    for (int x = r->rect.min.x; x <= r->rect.max.x; ++x) {
      bool open = true;
      for (int dy = -1; dy <= 1 && open; ++dy)
        for (int dx = -1; dx <= 1 && open; ++dx) open = map.is_free({x + dx, y + dy});
      if (open) cells.push_back({x, y});
    }
  if (cells.empty()) return room_anchor(map, room);
  return map.center_of(cells[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(cells.size()) - 1))]);
}

namespace {

const world::SensorPlacement* sensor_of(const world::HomeMap& map, world::SensorKind kind, const std::string& room) {
  for (const auto& s : map.sensors())
    if (s.kind == kind && s.room == room) return &s;
  return nullptr;
}

const world::SensorPlacement* contact_named(const world::HomeMap& map, std::string_view needle) {
  for (const auto& s : map.sensors())
    if (s.kind == world::SensorKind::Contact && s.id.find(needle) != std::string::npos) return &s;
  return nullptr;
}

struct ScriptBuilder {
  const world::HomeMap& map;
  const planning::NavGrid& grid;
  Rng& rng;
  Vec2 pos;
  double t = 0.0;
  std::vector<world::ScriptedAction> script;

  void walk(Vec2 to) {
    const double speed = rng.uniform(0.4, 0.8);
    world::MoveTo m;
    m.speed = speed;
    m.waypoints = walking_route(grid, map, pos, to);
    double len = 0.0;
    Vec2 p = pos;
    for (const auto& w : m.waypoints) {
      len += (w - p).norm();
      p = w;
    }
    script.push_back({std::nullopt, m});
    t += len / speed;
    pos = to;
  }
  void wait(double d) {
    script.push_back({std::nullopt, world::Wait{d}});
    t += d;
  }
  void contact(const std::string& id, bool open) { script.push_back({std::nullopt, world::SetContact{id, open}}); }
  void use_contact(const world::SensorPlacement& s) {
    walk(map.center_of(s.zone.min));
    contact(s.id, true);
    wait(rng.uniform(2.0, 6.0));
    contact(s.id, false);
  }
  const std::string& random_room() {
    const auto& rooms = map.rooms();
    return rooms[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(rooms.size()) - 1))].name;
  }
  // One activity: walk somewhere, maybe sit on a mat or use the fridge, rest.
  void activity(bool allow_stove) {
    const std::string room = random_room();
    const double u = rng.uniform();
    const auto* mat = sensor_of(map, world::SensorKind::Pressure, room);
    const auto* fridge = contact_named(map, "fridge");
    const auto* stove = contact_named(map, "stove");
    if (u < 0.3 && mat) {
      walk(map.center_of(mat->zone.min));
    } else if (u < 0.4 && fridge) {
      use_contact(*fridge);
    } else if (u < 0.45 && stove && allow_stove) {
      use_contact(*stove);
    } else {
      walk(random_room_point(map, room, rng));
    }
    wait(rng.uniform(3.0, 45.0));
  }
};

}  // namespace

std::vector<world::ScriptedAction> daily_activity_script(const world::HomeMap& map, const planning::NavGrid& grid,
                                                         Vec2 start, double duration, Rng& rng) {
  ScriptBuilder b{map, grid, rng, start, 0.0, {}};
  while (b.t < duration) b.activity(false);
  return std::move(b.script);
}

namespace {

constexpr double kHour = 3600.0;

struct Episode {
  EpisodeKind kind = EpisodeKind::Normal;
  double time_of_day = 0.0;
  world::AgentState agent;
  double incident = -1.0;  // fall or exit time
};

Episode make_episode(EpisodeKind kind, const world::HomeMap& map, const planning::NavGrid& grid,
                     const CorpusConfig& cfg, Rng& rng) {
  Episode ep;
  ep.kind = kind;
  ep.agent.id = "resident";
  const double L = cfg.episode_length;
  const auto* bed = sensor_of(map, world::SensorKind::Pressure, "bedroom");
  const auto* door = contact_named(map, "front_door");
  const auto* stove = contact_named(map, "stove");
  const bool night = kind == EpisodeKind::Sleep || kind == EpisodeKind::NightExit ||
                     (kind == EpisodeKind::Fall && rng.uniform() < 0.25);
  ep.time_of_day = night ? std::fmod(rng.uniform(22.0, 29.5) * kHour, 24.0 * kHour) : rng.uniform(6.0, 21.5) * kHour;

  ScriptBuilder b{map, grid, rng, Vec2::Zero(), 0.0, {}};
  if ((kind == EpisodeKind::Sleep || kind == EpisodeKind::NightExit) && bed) {
    b.pos = map.center_of(bed->zone.min);
  } else {
    const std::string room = b.random_room();
    b.pos = random_room_point(map, room, rng);
  }
  ep.agent.position = b.pos;
  ep.agent.heading = rng.uniform(-3.14159, 3.14159);

  switch (kind) {
    case EpisodeKind::Normal:
      while (b.t < L) b.activity(rng.uniform() < 0.5 && b.t < 1.0);
      break;
    case EpisodeKind::Sleep: {
      const double trip = rng.uniform() < 0.5 ? rng.uniform(60.0, 400.0) : L;
      if (trip < L && bed) {
        b.wait(trip);
        b.walk(random_room_point(map, "bathroom", rng));
        b.wait(rng.uniform(20.0, 45.0));
        b.walk(map.center_of(bed->zone.min));
      }
      b.wait(L);
      break;
    }
    case EpisodeKind::Away:
    case EpisodeKind::NightExit: {
      const double leave = rng.uniform(30.0, 200.0);
      if (kind == EpisodeKind::Away)
        while (b.t < leave) b.activity(false);
      else
        b.wait(leave);
      if (door) {
        b.walk(map.center_of(door->zone.min));
        b.contact(door->id, true);
        b.wait(1.0);
        ep.incident = b.t;
        b.script.push_back({std::nullopt, world::Exit{}});
        b.contact(door->id, false);
      }
      break;
    }
    case EpisodeKind::Fall: {
      const double when = rng.uniform(40.0, 250.0);
      while (b.t < when) b.activity(false);
      std::string room = b.random_room();
      if (night)
        while (room == "bedroom") room = b.random_room();
      // Falls land on the room's pressure mat: the long-dwell archetype.
      const auto* mat = sensor_of(map, world::SensorKind::Pressure, room);
      b.walk(mat ? map.center_of(mat->zone.min) : random_room_point(map, room, rng));
      ep.incident = b.t;
      const int d = rng.uniform_int(0, 3);
      b.script.push_back({std::nullopt, world::Fall{static_cast<world::FallDirection>(d)}});
      break;
    }
    case EpisodeKind::RedundantCooking: {
      const double start = rng.uniform(30.0, 150.0);
      while (b.t < start) b.activity(false);
      const int uses = rng.uniform_int(3, 5);
      for (int i = 0; i < uses && stove; ++i) {
        b.use_contact(*stove);
        b.walk(random_room_point(map, b.random_room(), rng));
        b.wait(rng.uniform(5.0, 30.0));
      }
      while (b.t < L) b.activity(false);
      break;
    }
  }
  ep.agent.script = std::move(b.script);
  return ep;
}

}  // namespace

std::vector<detection::LabeledSample> generate_corpus(const world::HomeMap& map, const CorpusConfig& cfg,
                                                      const detection::FeatureConfig& features) {
  const planning::NavGrid grid(map);
  std::vector<std::pair<EpisodeKind, int>> plan{{EpisodeKind::Normal, cfg.normal_episodes},
                                                {EpisodeKind::Sleep, cfg.sleep_episodes},
                                                {EpisodeKind::Away, cfg.away_episodes},
                                                {EpisodeKind::Fall, cfg.fall_episodes},
                                                {EpisodeKind::NightExit, cfg.night_exit_episodes},
                                                {EpisodeKind::RedundantCooking, cfg.cooking_episodes}};
  const auto* stove = contact_named(map, "stove");
  std::vector<detection::LabeledSample> out;
  std::uint64_t index = 0;
  for (const auto& [kind, count] : plan) {
    for (int e = 0; e < count; ++e) {
      Rng rng(mix_seed(cfg.seed, ++index));
      Episode ep = make_episode(kind, map, grid, cfg, rng);
      detection::FeatureConfig fc = features;
      fc.day_start_offset = ep.time_of_day;

      world::WorldState state;
      state.map = map;
      state.agents.push_back(ep.agent);
      state.rng = rng.fork(1);
      std::deque<sensors::SensorEvent> window;
      std::vector<double> stove_opens;
      const auto steps = static_cast<std::uint64_t>(std::llround(cfg.episode_length / fc.sample_period));
      const auto every = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(cfg.sample_every / fc.sample_period)));
      for (std::uint64_t k = 1; k <= steps; ++k) {
        state = world::step_world(std::move(state), fc.sample_period);
        state.clock = static_cast<double>(k) * fc.sample_period;
        for (auto& ev : sensors::sample_environment_sensors(state)) {
          if (stove && ev.sensor_id == stove->id && ev.value) stove_opens.push_back(ev.timestamp);
          window.push_back(std::move(ev));
        }
        while (!window.empty() && window.front().timestamp <= state.clock - fc.window) window.pop_front();
        if (k % every != 0 || state.clock < cfg.warmup) continue;

        const double t = state.clock;
        bool anomalous = false;
        bool skip = false;
        const auto& agent = state.agents.front();
        if (kind == EpisodeKind::Fall && agent.fallen) {
          anomalous = t - agent.fall_time >= cfg.fall_label_delay;
          skip = !anomalous;
        } else if (kind == EpisodeKind::NightExit && ep.incident >= 0.0 && t >= ep.incident) {
          anomalous = t >= ep.incident + 10.0;
          skip = !anomalous;
        } else if (kind == EpisodeKind::RedundantCooking) {
          int n = 0;
          for (double s : stove_opens) n += s > t - fc.window;
          anomalous = n >= 3;
          skip = n == 2;
        }
        if (skip) continue;
        const std::vector<sensors::SensorEvent> events(window.begin(), window.end());
        out.push_back({detection::extract_features(events, t, map, fc), anomalous});
      }
    }
  }
  return out;
}

}  // namespace homebot::scenario
