#include "homebot/world/map.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "homebot/error.hpp"

namespace homebot::world {

using nlohmann::json;

std::string_view to_string(SensorKind kind) {
  switch (kind) {
    case SensorKind::Pressure: return "pressure";
    case SensorKind::Contact: return "contact";
    case SensorKind::PIR: return "pir";
  }
  return "pressure";
}

SensorKind sensor_kind_from_string(std::string_view s) {
  if (s == "pressure") return SensorKind::Pressure;
  if (s == "contact") return SensorKind::Contact;
  if (s == "pir") return SensorKind::PIR;
  throw ParseError("unknown sensor kind '" + std::string(s) + "'");
}

HomeMap::HomeMap(int width, int height, double cell_size)
    : width_(width), height_(height), cell_size_(cell_size) {
  if (width <= 0 || height <= 0) throw ValidationError("grid dimensions must be positive");
  if (!(cell_size > 0.0)) throw ValidationError("cell_size must be positive");
  occupancy_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), Occupancy::Free);
}

Cell HomeMap::cell_of(const Vec2& p) const {
  return {static_cast<int>(std::floor(p.x() / cell_size_)), static_cast<int>(std::floor(p.y() / cell_size_))};
}

Vec2 HomeMap::center_of(Cell c) const {
  return {(c.x + 0.5) * cell_size_, (c.y + 0.5) * cell_size_};
}

const Room* HomeMap::find_room(std::string_view name) const {
  for (const auto& r : rooms_)
    if (r.name == name) return &r;
  return nullptr;
}

const Room* HomeMap::room_at(Cell c) const {
  for (const auto& r : rooms_)
    if (r.rect.contains(c)) return &r;
  return nullptr;
}

void HomeMap::resolve_sensor_rooms() {
  for (auto& s : sensors_)
    if (const Room* r = room_at(s.zone.min)) s.room = r->name;
}

const SensorPlacement* HomeMap::find_sensor(std::string_view id) const {
  for (const auto& s : sensors_)
    if (s.id == id) return &s;
  return nullptr;
}

void HomeMap::validate() const {
  auto rect_in_bounds = [&](const CellRect& r) {
    return in_bounds(r.min) && in_bounds(r.max) && r.min.x <= r.max.x && r.min.y <= r.max.y;
  };
  std::set<std::string> room_names;
  for (const auto& room : rooms_) {
    if (!rect_in_bounds(room.rect)) throw ValidationError("room '" + room.name + "' lies outside the grid");
    if (!room_names.insert(room.name).second) throw ValidationError("duplicate room name '" + room.name + "'");
    bool any_free = false;
    for (int y = room.rect.min.y; y <= room.rect.max.y && !any_free; ++y)
      for (int x = room.rect.min.x; x <= room.rect.max.x && !any_free; ++x) any_free = is_free({x, y});
    if (!any_free) throw ValidationError("room '" + room.name + "' has no free cell");
  }
  for (const auto& door : doors_) {
    const std::string where = "door at (" + std::to_string(door.cell.x) + "," + std::to_string(door.cell.y) + ")";
    if (!is_free(door.cell)) throw ValidationError(where + " is not on a free cell");
    for (const auto& link : {door.room_a, door.room_b})
      if (!find_room(link)) throw ValidationError(where + " links unknown room '" + link + "'");
  }
  std::set<std::string> ids;
  for (const auto& s : sensors_) {
    if (!ids.insert(s.id).second) throw ValidationError("duplicate sensor id '" + s.id + "'");
    if (!rect_in_bounds(s.zone)) throw ValidationError("sensor '" + s.id + "' lies outside the grid");
    if (s.kind != SensorKind::PIR && !is_free(s.zone.min))
      throw ValidationError("sensor '" + s.id + "' is placed on a wall cell");
  }
}

namespace {

Cell parse_cell(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
    throw ParseError(what + ": expected [x, y] integer cell");
  return {j[0].get<int>(), j[1].get<int>()};
}

CellRect parse_rect(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 4) throw ParseError(what + ": expected [x0, y0, x1, y1]");
  for (const auto& v : j)
    if (!v.is_number_integer()) throw ParseError(what + ": rectangle corners must be integers");
  return {{j[0].get<int>(), j[1].get<int>()}, {j[2].get<int>(), j[3].get<int>()}};
}

const json& require(const json& obj, const char* key, const std::string& what) {
  if (!obj.is_object() || !obj.contains(key)) throw ParseError(what + ": missing key '" + key + "'");
  return obj.at(key);
}

}  // namespace

HomeMap load_map(const json& d) {
  const json& grid = require(d, "grid", "map");
  const json& w = require(grid, "width", "grid");
  const json& h = require(grid, "height", "grid");
  if (!w.is_number_integer() || !h.is_number_integer()) throw ParseError("grid: width/height must be integers");
  if (w.get<int>() <= 0 || h.get<int>() <= 0) throw ParseError("grid: dimensions must be positive");
  HomeMap map(w.get<int>(), h.get<int>(), grid.value("cell_size", 0.1));
  map.set_name(d.value("name", std::string("unnamed")));

  if (grid.contains("walls")) {
    std::size_t i = 0;
    for (const auto& wj : grid.at("walls")) {
      const auto r = parse_rect(wj, "grid.walls[" + std::to_string(i++) + "]");
      for (int y = std::max(0, r.min.y); y <= std::min(map.height() - 1, r.max.y); ++y)
        for (int x = std::max(0, r.min.x); x <= std::min(map.width() - 1, r.max.x); ++x) map.set({x, y}, Occupancy::Wall);
    }
  }
  if (d.contains("rooms")) {
    for (const auto& rj : d.at("rooms")) {
      const auto name = require(rj, "name", "room").get<std::string>();
      map.add_room({name, parse_rect(require(rj, "rect", "room '" + name + "'"), "room '" + name + "'")});
    }
  }
  if (d.contains("doors")) {
    std::size_t i = 0;
    for (const auto& dj : d.at("doors")) {
      const std::string what = "doors[" + std::to_string(i++) + "]";
      const auto& links = require(dj, "links", what);
      if (!links.is_array() || links.size() != 2) throw ParseError(what + ": links must name two rooms");
      map.add_door({parse_cell(require(dj, "cell", what), what), links[0].get<std::string>(), links[1].get<std::string>()});
    }
  }
  if (d.contains("sensors")) {
    for (const auto& sj : d.at("sensors")) {
      SensorPlacement s;
      s.id = require(sj, "id", "sensor").get<std::string>();
      const std::string what = "sensor '" + s.id + "'";
      try {
        s.kind = sensor_kind_from_string(require(sj, "kind", what).get<std::string>());
      } catch (const ParseError& e) {
        throw ParseError(what + ": " + e.what());
      }
      if (sj.contains("cell")) {
        const Cell c = parse_cell(sj.at("cell"), what);
        s.zone = {c, c};
      } else if (sj.contains("zone")) {
        s.zone = parse_rect(sj.at("zone"), what);
      } else {
        throw ParseError(what + ": needs 'cell' or 'zone'");
      }
      map.add_sensor(std::move(s));
    }
  }
  map.validate();
  map.resolve_sensor_rooms();
  return map;
}

HomeMap load_map_text(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("map: ") + e.what());
  }
  return load_map(j);
}

HomeMap load_map_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open map file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return load_map_text(buf.str());
}

}  // namespace homebot::world
