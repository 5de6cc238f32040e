#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace homebot::world {

using Vec2 = Eigen::Vector2d;

struct Cell {
  int x = 0;
  int y = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Inclusive cell rectangle.
struct CellRect {
  Cell min;
  Cell max;
  [[nodiscard]] bool contains(Cell c) const {
    return c.x >= min.x && c.x <= max.x && c.y >= min.y && c.y <= max.y;
  }
};

enum class Occupancy : unsigned char { Free, Wall };

enum class SensorKind { Pressure, Contact, PIR };

std::string_view to_string(SensorKind kind);
SensorKind sensor_kind_from_string(std::string_view s);

struct Room {
  std::string name;
  CellRect rect;
};

struct Door {
  Cell cell;
  std::string room_a;
  std::string room_b;
};

/// A sensor occupies either a single cell (pressure mats, contacts) or a
/// rectangular zone (PIR). Single-cell placements are stored as 1x1 zones.
struct SensorPlacement {
  std::string id;
  SensorKind kind = SensorKind::Pressure;
  CellRect zone;
  std::string room;  // derived: room containing the zone's first cell
};

class HomeMap {
 public:
  HomeMap() = default;
  HomeMap(int width, int height, double cell_size);

  [[nodiscard]] int width() const { return width_; }
  [[nodiscard]] int height() const { return height_; }
  [[nodiscard]] double cell_size() const { return cell_size_; }
  [[nodiscard]] std::string const& name() const { return name_; }

  [[nodiscard]] bool in_bounds(Cell c) const {
    return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_;
  }
  [[nodiscard]] Occupancy at(Cell c) const { return occupancy_[index(c)]; }
  [[nodiscard]] bool is_free(Cell c) const { return in_bounds(c) && at(c) == Occupancy::Free; }
  [[nodiscard]] std::size_t index(Cell c) const {
    return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(c.x);
  }

  /// Cell containing a metric point; may be out of bounds.
  [[nodiscard]] Cell cell_of(const Vec2& p) const;
  [[nodiscard]] Vec2 center_of(Cell c) const;
  [[nodiscard]] bool is_free_point(const Vec2& p) const { return is_free(cell_of(p)); }

  [[nodiscard]] std::vector<Room> const& rooms() const { return rooms_; }
  [[nodiscard]] std::vector<Door> const& doors() const { return doors_; }
  [[nodiscard]] std::vector<SensorPlacement> const& sensors() const { return sensors_; }

  [[nodiscard]] const Room* find_room(std::string_view name) const;
  [[nodiscard]] const Room* room_at(Cell c) const;
  [[nodiscard]] const SensorPlacement* find_sensor(std::string_view id) const;

  void set_name(std::string name) { name_ = std::move(name); }
  void set(Cell c, Occupancy o) { occupancy_[index(c)] = o; }
  void add_room(Room room) { rooms_.push_back(std::move(room)); }
  void add_door(Door door) { doors_.push_back(std::move(door)); }
  void add_sensor(SensorPlacement placement) { sensors_.push_back(std::move(placement)); }

  /// Fills SensorPlacement::room from the room rectangles.
  void resolve_sensor_rooms();

  /// Throws ValidationError naming the offending element.
  void validate() const;

 private:
  std::string name_;
  int width_ = 0;
  int height_ = 0;
  double cell_size_ = 0.1;
  std::vector<Occupancy> occupancy_;
  std::vector<Room> rooms_;
  std::vector<Door> doors_;
  std::vector<SensorPlacement> sensors_;
};

/// Parses and validates a JSON map description.
///
/// Keys: `grid` {width, height, cell_size, walls: [[x0,y0,x1,y1], ...]},
/// `rooms` [{name, rect}], `doors` [{cell, links}], `sensors`
/// [{id, kind, cell | zone}]. Errors are ParseError (malformed document) or
/// ValidationError (invariant violated) and name the offending element.
HomeMap load_map(const nlohmann::json& description);
HomeMap load_map_text(std::string_view text);
HomeMap load_map_file(const std::string& path);

/// The bundled 3 m x 3 m four-room apartment with eleven sensors.
HomeMap default_apartment();

}  // namespace homebot::world
