#include "homebot/scenario/config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "homebot/error.hpp"
#include "homebot/planning/navgrid.hpp"
#include "homebot/scenario/corpus.hpp"

namespace homebot::scenario {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ParseError(where + ": unknown key '" + key + "'");
  }
}

double number(const json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) throw ParseError(where + "." + key + ": expected a number");
  return obj[key].get<double>();
}

int integer(const json& obj, const char* key, int fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer()) throw ParseError(where + "." + key + ": expected an integer");
  return obj[key].get<int>();
}

bool boolean(const json& obj, const char* key, bool fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_boolean()) throw ParseError(where + "." + key + ": expected true or false");
  return obj[key].get<bool>();
}

std::string text(const json& obj, const char* key, std::string fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_string()) throw ParseError(where + "." + key + ": expected a string");
  return obj[key].get<std::string>();
}

Vec2 pair(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ParseError(where + ": expected [x, y]");
  return {v[0].get<double>(), v[1].get<double>()};
}

// Seeded source for randomized placements; set while a document is parsed.
thread_local Rng* placement_rng = nullptr;

// A location is given as "cell": [cx, cy], "position": [x, y] in metres,
// "room": name (the room's anchor point) or "random_cell_in": [rooms] (a
// seeded random open cell of a randomly chosen room).
std::optional<Vec2> location(const json& obj, const world::HomeMap& map, const std::string& where) {
  if (obj.contains("cell")) {
    const Vec2 c = pair(obj["cell"], where + ".cell");
    return map.center_of({static_cast<int>(c.x()), static_cast<int>(c.y())});
  }
  if (obj.contains("position")) return pair(obj["position"], where + ".position");
  if (obj.contains("room")) {
    const auto name = text(obj, "room", "", where);
    if (!map.find_room(name)) throw ValidationError(where + ".room: unknown room '" + name + "'");
    return room_anchor(map, name);
  }
  if (obj.contains("one_of")) {
    const json& cells = obj["one_of"];
    if (!cells.is_array() || cells.empty()) throw ParseError(where + ".one_of: expected a list of cells");
    Rng& rng = *placement_rng;
    const auto pick = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(cells.size()) - 1));
    for (std::size_t i = 0; i < cells.size(); ++i) (void)pair(cells[i], where + ".one_of");
    const Vec2 c = pair(cells[pick], where + ".one_of");
    return map.center_of({static_cast<int>(c.x()), static_cast<int>(c.y())});
  }
  if (obj.contains("random_cell_in")) {
    const json& rooms = obj["random_cell_in"];
    if (!rooms.is_array() || rooms.empty()) throw ParseError(where + ".random_cell_in: expected a list of rooms");
    for (const auto& r : rooms)
      if (!r.is_string() || !map.find_room(r.get<std::string>()))
        throw ValidationError(where + ".random_cell_in: unknown room " + r.dump());
    Rng& rng = *placement_rng;
    const auto pick = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(rooms.size()) - 1));
    return random_room_point(map, rooms[pick].get<std::string>(), rng);
  }
  return std::nullopt;
}

std::string resolve(const std::string& path, const std::string& base_dir) {
  const fs::path p(path);
  return p.is_absolute() ? p.string() : (fs::path(base_dir) / p).lexically_normal().string();
}

world::VitalsProfile parse_vitals(const json& j, const std::string& where) {
  check_keys(j, {"hand_blueness", "chin_pitch_deg", "face_orientation", "breathing_interval", "breathing_cv",
                 "bleeding_location", "bleeding_rate"},
             where);
  world::VitalsProfile v;
  v.hand_blueness = number(j, "hand_blueness", v.hand_blueness, where);
  v.chin_pitch_deg = number(j, "chin_pitch_deg", v.chin_pitch_deg, where);
  v.face_orientation = text(j, "face_orientation", v.face_orientation, where);
  v.breathing_interval = number(j, "breathing_interval", v.breathing_interval, where);
  v.breathing_cv = number(j, "breathing_cv", v.breathing_cv, where);
  v.bleeding_location = text(j, "bleeding_location", v.bleeding_location, where);
  v.bleeding_rate_cm2_s = number(j, "bleeding_rate", v.bleeding_rate_cm2_s, where);
  try {
    (void)triage::face_orientation_from_string(v.face_orientation);
    (void)triage::bleed_location_from_string(v.bleeding_location);
  } catch (const Error& e) {
    throw ValidationError(where + ": " + e.what());
  }
  return v;
}

std::vector<world::ScriptedAction> parse_script(const json& arr, const world::HomeMap& map,
                                                const planning::NavGrid& grid, Vec2 position, bool away,
                                                const std::string& where) {
  if (!arr.is_array()) throw ParseError(where + ": expected a list of actions");
  std::vector<world::ScriptedAction> script;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const json& a = arr[i];
    const std::string w = where + "[" + std::to_string(i) + "]";
    if (!a.is_object()) throw ParseError(w + ": expected an object");
    const std::string kind = text(a, "action", "", w);
    world::ScriptedAction step;
    if (a.contains("at")) step.at = number(a, "at", 0.0, w);
    if (kind == "walk_to") {
      check_keys(a, {"action", "at", "cell", "position", "room", "random_cell_in", "one_of", "speed"}, w);
      const auto target = location(a, map, w);
      if (!target) throw ParseError(w + ": walk_to needs cell, position or room");
      if (away) throw ValidationError(w + ": walk_to while the agent is away");
      world::MoveTo move;
      move.speed = number(a, "speed", 0.5, w);
      try {
        move.waypoints = walking_route(grid, map, position, *target);
      } catch (const Error& e) {
        throw ValidationError(w + ": " + e.what());
      }
      position = *target;
      step.action = move;
    } else if (kind == "move") {
      check_keys(a, {"action", "at", "waypoints", "cells", "speed"}, w);
      world::MoveTo move;
      move.speed = number(a, "speed", 0.5, w);
      if (a.contains("waypoints"))
        for (const auto& p : a["waypoints"]) move.waypoints.push_back(pair(p, w + ".waypoints"));
      if (a.contains("cells"))
        for (const auto& p : a["cells"]) {
          const Vec2 c = pair(p, w + ".cells");
          move.waypoints.push_back(map.center_of({static_cast<int>(c.x()), static_cast<int>(c.y())}));
        }
      if (move.waypoints.empty()) throw ParseError(w + ": move needs waypoints or cells");
      position = move.waypoints.back();
      step.action = move;
    } else if (kind == "wait") {
      check_keys(a, {"action", "at", "duration"}, w);
      step.action = world::Wait{number(a, "duration", 0.0, w)};
    } else if (kind == "fall") {
      check_keys(a, {"action", "at", "direction"}, w);
      try {
        step.action = world::Fall{world::fall_direction_from_string(text(a, "direction", "forward", w))};
      } catch (const Error& e) {
        throw ValidationError(w + ": " + e.what());
      }
    } else if (kind == "stand_up") {
      check_keys(a, {"action", "at"}, w);
      step.action = world::StandUp{};
    } else if (kind == "contact") {
      check_keys(a, {"action", "at", "sensor", "open"}, w);
      const std::string id = text(a, "sensor", "", w);
      const auto* s = map.find_sensor(id);
      if (!s || s->kind != world::SensorKind::Contact)
        throw ValidationError(w + ": '" + id + "' is not a contact sensor of the map");
      step.action = world::SetContact{id, boolean(a, "open", true, w)};
    } else if (kind == "exit") {
      check_keys(a, {"action", "at"}, w);
      away = true;
      step.action = world::Exit{};
    } else if (kind == "enter") {
      check_keys(a, {"action", "at", "cell", "position", "room", "random_cell_in", "one_of"}, w);
      const auto target = location(a, map, w);
      if (!target) throw ParseError(w + ": enter needs cell, position or room");
      position = *target;
      away = false;
      step.action = world::Enter{*target};
    } else if (kind == "heading") {
      check_keys(a, {"action", "at", "value"}, w);
      step.action = world::SetHeading{number(a, "value", 0.0, w)};
    } else {
      throw ParseError(w + ": unknown action '" + kind + "'");
    }
    script.push_back(std::move(step));
  }
  return script;
}

world::AgentState parse_agent(const json& j, const world::HomeMap& map, const planning::NavGrid& grid,
                              const std::string& where) {
  check_keys(j, {"id", "cell", "position", "room", "random_cell_in", "one_of", "heading", "attributes", "vitals", "script"}, where);
  world::AgentState a;
  a.id = text(j, "id", "", where);
  if (a.id.empty()) throw ValidationError(where + ": agent id is required");
  const auto pos = location(j, map, where);
  if (!pos) throw ParseError(where + ": agent needs cell, position or room");
  a.position = *pos;
  a.heading = number(j, "heading", 0.0, where);
  if (j.contains("attributes")) {
    const json& at = j["attributes"];
    const std::string w = where + ".attributes";
    check_keys(at, {"body_height", "face_height", "face_width", "shoulder_width", "body_width", "skin_temperature",
                    "responsiveness", "response_delay", "away"},
               w);
    a.body_height = number(at, "body_height", a.body_height, w);
    a.face_height_offset = number(at, "face_height", a.body_height * 0.91, w);
    a.face_width = number(at, "face_width", a.face_width, w);
    a.shoulder_width = number(at, "shoulder_width", a.shoulder_width, w);
    a.body_width = number(at, "body_width", a.body_width, w);
    a.skin_temperature = number(at, "skin_temperature", a.skin_temperature, w);
    a.responsiveness = number(at, "responsiveness", a.responsiveness, w);
    a.response_delay = number(at, "response_delay", a.response_delay, w);
    a.away = boolean(at, "away", false, w);
    if (!(a.responsiveness >= 0.0 && a.responsiveness <= 1.0))
      throw ValidationError(w + ".responsiveness: must be in [0,1]");
    if (!(a.body_height > 0.0 && a.face_width > 0.0)) throw ValidationError(w + ": body sizes must be positive");
  }
  if (j.contains("vitals")) a.vitals_truth = parse_vitals(j["vitals"], where + ".vitals");
  a.breathing_interval = a.vitals_truth.breathing_interval;
  a.breathing_cv = a.vitals_truth.breathing_cv;
  a.next_exhale = a.breathing_interval > 0.0 ? a.breathing_interval : 0.0;
  if (j.contains("script")) a.script = parse_script(j["script"], map, grid, a.position, a.away, where + ".script");
  return a;
}

}  // namespace

ScenarioConfig parse_scenario(const json& doc, const std::string& base_dir) {
  check_keys(doc, {"name", "seed", "duration", "dt", "start_time_of_day", "map", "robot", "agents", "props",
                   "detection", "planning", "motion", "triage", "dialogue", "timing", "gas"},
             "scenario");
  ScenarioConfig cfg;
  cfg.name = text(doc, "name", "scenario", "scenario");
  if (!doc.contains("seed")) throw ValidationError("scenario.seed: a seed is required");
  if (!doc["seed"].is_number_integer() || doc["seed"].get<std::int64_t>() < 0) throw ParseError("scenario.seed: expected a non-negative integer");
  cfg.seed = doc["seed"].get<std::uint64_t>();
  cfg.source = doc;
  cfg.base_dir = base_dir;
  Rng rng(mix_seed(cfg.seed, 0x91acef));
  struct Guard {
    explicit Guard(Rng* r) { placement_rng = r; }
    ~Guard() { placement_rng = nullptr; }
  } guard(&rng);
  cfg.duration = number(doc, "duration", cfg.duration, "scenario");
  cfg.dt = number(doc, "dt", cfg.dt, "scenario");
  cfg.start_time_of_day = number(doc, "start_time_of_day", cfg.start_time_of_day, "scenario");

  if (doc.contains("map")) {
    cfg.map_path = resolve(text(doc, "map", "", "scenario"), base_dir);
    if (!fs::exists(cfg.map_path)) throw ValidationError("scenario.map: file '" + cfg.map_path + "' does not exist");
    cfg.map = world::load_map_file(cfg.map_path);
  } else {
    cfg.map = world::default_apartment();
  }
  const planning::NavGrid grid(cfg.map);

  if (doc.contains("robot")) {
    const json& r = doc["robot"];
    check_keys(r, {"cell", "position", "room", "heading"}, "scenario.robot");
    if (auto p = location(r, cfg.map, "scenario.robot")) cfg.robot_home = *p;
    cfg.robot_heading = number(r, "heading", 0.0, "scenario.robot");
  } else {
    cfg.robot_home = cfg.map.center_of({13, 5});
    cfg.robot_heading = 3.141592653589793;
  }

  if (doc.contains("agents")) {
    if (!doc["agents"].is_array()) throw ParseError("scenario.agents: expected a list");
    for (std::size_t i = 0; i < doc["agents"].size(); ++i)
      cfg.agents.push_back(parse_agent(doc["agents"][i], cfg.map, grid, "scenario.agents[" + std::to_string(i) + "]"));
  }
  if (doc.contains("props")) {
    if (!doc["props"].is_array()) throw ParseError("scenario.props: expected a list");
    for (std::size_t i = 0; i < doc["props"].size(); ++i) {
      const json& p = doc["props"][i];
      const std::string w = "scenario.props[" + std::to_string(i) + "]";
      check_keys(p, {"name", "cell", "position", "room", "extent", "temperature", "ambient", "cooling_time",
                     "placed_at"},
                 w);
      world::Prop prop;
      prop.name = text(p, "name", "prop" + std::to_string(i), w);
      if (auto pos = location(p, cfg.map, w)) prop.position = *pos;
      prop.extent = number(p, "extent", prop.extent, w);
      prop.initial_temperature = number(p, "temperature", prop.initial_temperature, w);
      prop.ambient_temperature = number(p, "ambient", prop.ambient_temperature, w);
      prop.cooling_time_constant = number(p, "cooling_time", prop.cooling_time_constant, w);
      prop.placed_at = number(p, "placed_at", prop.placed_at, w);
      cfg.props.push_back(prop);
    }
  }

  if (doc.contains("detection")) {
    const json& d = doc["detection"];
    const std::string w = "scenario.detection";
    check_keys(d, {"window", "classify_period", "confirm_count", "rearm_delay", "forest", "corpus", "fallen", "laser"},
               w);
    auto& s = cfg.detection;
    s.features.window = number(d, "window", s.features.window, w);
    s.classify_period = number(d, "classify_period", s.classify_period, w);
    s.confirm_count = integer(d, "confirm_count", s.confirm_count, w);
    s.rearm_delay = number(d, "rearm_delay", s.rearm_delay, w);
    if (d.contains("forest")) {
      const json& f = d["forest"];
      check_keys(f, {"n_trees", "max_depth", "min_samples_split", "features_per_split", "seed", "model"}, w + ".forest");
      s.forest.n_trees = integer(f, "n_trees", s.forest.n_trees, w + ".forest");
      s.forest.max_depth = integer(f, "max_depth", s.forest.max_depth, w + ".forest");
      s.forest.min_samples_split = integer(f, "min_samples_split", s.forest.min_samples_split, w + ".forest");
      s.forest.features_per_split = integer(f, "features_per_split", s.forest.features_per_split, w + ".forest");
      s.forest.seed = static_cast<std::uint64_t>(integer(f, "seed", static_cast<int>(s.forest.seed), w + ".forest"));
      if (f.contains("model")) {
        s.forest_model = resolve(text(f, "model", "", w + ".forest"), base_dir);
        if (!fs::exists(s.forest_model))
          throw ValidationError(w + ".forest.model: file '" + s.forest_model + "' does not exist");
      }
    }
    if (d.contains("corpus")) {
      const json& c = d["corpus"];
      const std::string wc = w + ".corpus";
      check_keys(c, {"normal", "sleep", "away", "fall", "night_exit", "cooking", "episode_length", "sample_every",
                     "fall_label_delay", "warmup", "seed"},
                 wc);
      auto& k = s.corpus;
      k.normal_episodes = integer(c, "normal", k.normal_episodes, wc);
      k.sleep_episodes = integer(c, "sleep", k.sleep_episodes, wc);
      k.away_episodes = integer(c, "away", k.away_episodes, wc);
      k.fall_episodes = integer(c, "fall", k.fall_episodes, wc);
      k.night_exit_episodes = integer(c, "night_exit", k.night_exit_episodes, wc);
      k.cooking_episodes = integer(c, "cooking", k.cooking_episodes, wc);
      k.episode_length = number(c, "episode_length", k.episode_length, wc);
      k.sample_every = number(c, "sample_every", k.sample_every, wc);
      k.fall_label_delay = number(c, "fall_label_delay", k.fall_label_delay, wc);
      k.warmup = number(c, "warmup", k.warmup, wc);
      k.seed = static_cast<std::uint64_t>(integer(c, "seed", static_cast<int>(k.seed), wc));
    }
    if (d.contains("fallen")) {
      const json& f = d["fallen"];
      check_keys(f, {"size_min", "size_max", "temp_min", "temp_max"}, w + ".fallen");
      s.fallen.size_min = number(f, "size_min", s.fallen.size_min, w + ".fallen");
      s.fallen.size_max = number(f, "size_max", s.fallen.size_max, w + ".fallen");
      s.fallen.temp_min = number(f, "temp_min", s.fallen.temp_min, w + ".fallen");
      s.fallen.temp_max = number(f, "temp_max", s.fallen.temp_max, w + ".fallen");
    }
    if (d.contains("laser")) {
      const json& l = d["laser"];
      check_keys(l, {"max_range", "extent_noise", "temperature_noise", "foreshortening_deg"}, w + ".laser");
      s.laser.max_range = number(l, "max_range", s.laser.max_range, w + ".laser");
      s.laser.extent_noise = number(l, "extent_noise", s.laser.extent_noise, w + ".laser");
      s.laser.temperature_noise = number(l, "temperature_noise", s.laser.temperature_noise, w + ".laser");
      s.laser.foreshortening_angle_deg = number(l, "foreshortening_deg", s.laser.foreshortening_angle_deg, w + ".laser");
    }
  }
  cfg.detection.features.sample_period = cfg.dt;
  cfg.detection.features.day_start_offset = cfg.start_time_of_day;

  if (doc.contains("planning")) {
    const json& p = doc["planning"];
    const std::string w = "scenario.planning";
    check_keys(p, {"approach_distance", "help", "faces"}, w);
    auto& s = cfg.planning;
    s.approach_distance = number(p, "approach_distance", s.approach_distance, w);
    if (p.contains("help")) {
      const json& h = p["help"];
      const std::string wh = w + ".help";
      check_keys(h, {"enabled", "budget", "reach", "w_dist", "w_adult", "face_width_prior", "d_max", "h_adult"}, wh);
      s.help_enabled = boolean(h, "enabled", s.help_enabled, wh);
      s.help_budget = number(h, "budget", s.help_budget, wh);
      s.help_reach = number(h, "reach", s.help_reach, wh);
      s.helpfulness.w_dist = number(h, "w_dist", s.helpfulness.w_dist, wh);
      s.helpfulness.w_adult = number(h, "w_adult", s.helpfulness.w_adult, wh);
      s.helpfulness.face_width_prior = number(h, "face_width_prior", s.helpfulness.face_width_prior, wh);
      s.helpfulness.d_max = number(h, "d_max", s.helpfulness.d_max, wh);
      s.helpfulness.h_adult = number(h, "h_adult", s.helpfulness.h_adult, wh);
    }
    if (p.contains("faces")) {
      const json& f = p["faces"];
      const std::string wf = w + ".faces";
      check_keys(f, {"fov", "max_range", "height_noise", "width_noise", "miss_free_range", "miss_slope"}, wf);
      s.faces.fov = number(f, "fov", s.faces.fov, wf);
      s.faces.max_range = number(f, "max_range", s.faces.max_range, wf);
      s.faces.height_noise = number(f, "height_noise", s.faces.height_noise, wf);
      s.faces.width_noise = number(f, "width_noise", s.faces.width_noise, wf);
      s.faces.miss_free_range = number(f, "miss_free_range", s.faces.miss_free_range, wf);
      s.faces.miss_slope = number(f, "miss_slope", s.faces.miss_slope, wf);
    }
  }
  if (doc.contains("motion")) {
    const json& m = doc["motion"];
    check_keys(m, {"speed", "turn_rate"}, "scenario.motion");
    cfg.motion.speed = number(m, "speed", cfg.motion.speed, "scenario.motion");
    cfg.motion.turn_rate = number(m, "turn_rate", cfg.motion.turn_rate, "scenario.motion");
  }
  if (doc.contains("triage")) {
    const json& t = doc["triage"];
    const std::string w = "scenario.triage";
    check_keys(t, {"observation", "thresholds", "noise"}, w);
    cfg.triage.observation = number(t, "observation", cfg.triage.observation, w);
    if (t.contains("thresholds")) {
      const json& h = t["thresholds"];
      const std::string wt = w + ".thresholds";
      check_keys(h, {"blueness", "pitch_open_deg", "fast_rate", "slow_rate", "agonal_cv", "min_window",
                     "bleed_area_min", "bleed_rate_hi", "bleed_rate_min"},
                 wt);
      auto& th = cfg.triage.thresholds;
      th.blueness = number(h, "blueness", th.blueness, wt);
      th.pitch_open_deg = number(h, "pitch_open_deg", th.pitch_open_deg, wt);
      th.fast_rate = number(h, "fast_rate", th.fast_rate, wt);
      th.slow_rate = number(h, "slow_rate", th.slow_rate, wt);
      th.agonal_cv = number(h, "agonal_cv", th.agonal_cv, wt);
      th.min_window = number(h, "min_window", th.min_window, wt);
      th.bleed_area_min = number(h, "bleed_area_min", th.bleed_area_min, wt);
      th.bleed_rate_hi = number(h, "bleed_rate_hi", th.bleed_rate_hi, wt);
      th.bleed_rate_min = number(h, "bleed_rate_min", th.bleed_rate_min, wt);
    }
    if (t.contains("noise")) {
      const json& n = t["noise"];
      const std::string wn = w + ".noise";
      check_keys(n, {"enabled", "blueness_sd", "pitch_sd_deg", "orientation_confusion", "interval_jitter",
                     "missed_breath", "region_confusion", "area_sd"},
                 wn);
      auto& nz = cfg.triage.noise;
      nz.enabled = boolean(n, "enabled", nz.enabled, wn);
      nz.blueness_sd = number(n, "blueness_sd", nz.blueness_sd, wn);
      nz.pitch_sd_deg = number(n, "pitch_sd_deg", nz.pitch_sd_deg, wn);
      nz.orientation_confusion = number(n, "orientation_confusion", nz.orientation_confusion, wn);
      nz.interval_jitter = number(n, "interval_jitter", nz.interval_jitter, wn);
      nz.missed_breath = number(n, "missed_breath", nz.missed_breath, wn);
      nz.region_confusion = number(n, "region_confusion", nz.region_confusion, wn);
      nz.area_sd = number(n, "area_sd", nz.area_sd, wn);
    }
  }
  if (doc.contains("dialogue")) {
    const json& d = doc["dialogue"];
    check_keys(d, {"accuracy", "timeout"}, "scenario.dialogue");
    cfg.dialogue.accuracy = number(d, "accuracy", cfg.dialogue.accuracy, "scenario.dialogue");
    cfg.dialogue.timeout = number(d, "timeout", cfg.dialogue.timeout, "scenario.dialogue");
  }
  if (doc.contains("timing")) {
    const json& t = doc["timing"];
    check_keys(t, {"exclude_rooms"}, "scenario.timing");
    if (t.contains("exclude_rooms")) {
      if (!t["exclude_rooms"].is_array()) throw ParseError("scenario.timing.exclude_rooms: expected a list");
      cfg.timing_excluded_rooms.clear();
      for (const auto& r : t["exclude_rooms"]) {
        if (!r.is_string()) throw ParseError("scenario.timing.exclude_rooms: expected room names");
        cfg.timing_excluded_rooms.push_back(r.get<std::string>());
      }
    }
  }
  if (doc.contains("gas")) {
    const json& g = doc["gas"];
    check_keys(g, {"baseline", "puff_amplitude", "plume_sigma", "puff_lifetime", "rise_time_constant",
                   "decay_time_constant", "noise_stddev"},
               "scenario.gas");
    auto& m = cfg.gas;
    m.baseline = number(g, "baseline", m.baseline, "scenario.gas");
    m.puff_amplitude = number(g, "puff_amplitude", m.puff_amplitude, "scenario.gas");
    m.plume_sigma = number(g, "plume_sigma", m.plume_sigma, "scenario.gas");
    m.puff_lifetime = number(g, "puff_lifetime", m.puff_lifetime, "scenario.gas");
    m.rise_time_constant = number(g, "rise_time_constant", m.rise_time_constant, "scenario.gas");
    m.decay_time_constant = number(g, "decay_time_constant", m.decay_time_constant, "scenario.gas");
    m.noise_stddev = number(g, "noise_stddev", m.noise_stddev, "scenario.gas");
  }
  validate(cfg);
  return cfg;
}

void validate(const ScenarioConfig& cfg) {
  const auto& d = cfg.dialogue;
  if (!(d.accuracy >= 0.0 && d.accuracy <= 1.0)) throw ValidationError("scenario.dialogue.accuracy: must be in [0,1]");
  if (!(d.timeout > 0.0)) throw ValidationError("scenario.dialogue.timeout: must be positive");
  if (!(cfg.duration > 0.0)) throw ValidationError("scenario.duration: must be positive");
  if (!(cfg.dt > 0.0 && cfg.dt <= 1.0)) throw ValidationError("scenario.dt: must be in (0, 1]");
  if (!(cfg.motion.speed > 0.0 && cfg.motion.turn_rate > 0.0))
    throw ValidationError("scenario.motion: speed and turn_rate must be positive");
  if (!(cfg.detection.features.window > 0.0)) throw ValidationError("scenario.detection.window: must be positive");
  if (!(cfg.detection.classify_period > 0.0))
    throw ValidationError("scenario.detection.classify_period: must be positive");
  if (cfg.detection.confirm_count < 1) throw ValidationError("scenario.detection.confirm_count: must be at least 1");
  if (cfg.triage.observation < cfg.triage.thresholds.min_window)
    throw ValidationError("scenario.triage.observation: shorter than the breathing window");
  if (!(cfg.planning.help_budget >= 0.0)) throw ValidationError("scenario.planning.help.budget: must be >= 0");
  if (!cfg.map.is_free_point(cfg.robot_home)) throw ValidationError("scenario.robot: home is not on a free cell");
  std::set<std::string> ids;
  for (const auto& a : cfg.agents) {
    if (!ids.insert(a.id).second) throw ValidationError("scenario.agents: duplicate id '" + a.id + "'");
    if (!a.away && !cfg.map.is_free_point(a.position))
      throw ValidationError("scenario.agents: '" + a.id + "' starts on a wall or outside the map");
  }
  for (const auto& p : cfg.props)
    if (!cfg.map.is_free_point(p.position))
      throw ValidationError("scenario.props: '" + p.name + "' is not on a free cell");
}

ScenarioConfig with_seed(const ScenarioConfig& cfg, std::uint64_t seed) {
  if (cfg.source.is_null()) {
    ScenarioConfig copy = cfg;
    copy.seed = seed;
    return copy;
  }
  json doc = cfg.source;
  doc["seed"] = seed;
  return parse_scenario(doc, cfg.base_dir);
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot read scenario '" + path + "'");
  json doc;
  try {
    doc = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ParseError("scenario '" + path + "': " + e.what());
  }
  return parse_scenario(doc, fs::path(path).parent_path().string().empty() ? "." : fs::path(path).parent_path().string());
}

}  // namespace homebot::scenario
