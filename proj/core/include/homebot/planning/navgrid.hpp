#pragma once

#include <array>
#include <optional>
#include <vector>

#include "homebot/world/map.hpp"

namespace homebot::planning {

using world::Cell;

inline constexpr double kSqrt2 = 1.4142135623730951;

/// Path length as an exact count of straight and diagonal moves, so equal
/// paths compare equal regardless of move order.
struct StepCost {
  long straight = 0;
  long diagonal = 0;
  [[nodiscard]] double value() const { return static_cast<double>(straight) + static_cast<double>(diagonal) * kSqrt2; }
  friend bool operator==(const StepCost&, const StepCost&) = default;
};

/// 8-connected passability grid derived from a HomeMap. Straight moves cost
/// 1 cell, diagonal moves sqrt(2); a diagonal is forbidden when both
/// orthogonal neighbours it passes are blocked.
class NavGrid {
 public:
  NavGrid() = default;
  explicit NavGrid(const world::HomeMap& map);
  NavGrid(int width, int height, std::vector<bool> passable, double cell_size = 0.1);

  [[nodiscard]] int width() const { return width_; }
  [[nodiscard]] int height() const { return height_; }
  [[nodiscard]] double cell_size() const { return cell_size_; }
  [[nodiscard]] bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
  [[nodiscard]] bool passable(Cell c) const { return in_bounds(c) && passable_[index(c)]; }
  [[nodiscard]] std::size_t index(Cell c) const {
    return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(c.x);
  }
  [[nodiscard]] Cell cell(std::size_t index) const {
    return {static_cast<int>(index % static_cast<std::size_t>(width_)), static_cast<int>(index / static_cast<std::size_t>(width_))};
  }
  [[nodiscard]] std::size_t size() const { return passable_.size(); }

  struct Neighbor {
    Cell cell;
    bool diagonal;
  };
  /// Legal moves out of `c`, in a fixed order.
  [[nodiscard]] std::vector<Neighbor> neighbors(Cell c) const;

 private:
  int width_ = 0;
  int height_ = 0;
  double cell_size_ = 0.1;
  std::vector<bool> passable_;
};

struct Path {
  std::vector<Cell> cells;
  StepCost steps;
  /// Cost in cell units.
  [[nodiscard]] double total_cost() const { return steps.value(); }
};

/// Octile-heuristic A*, ties broken by (f, h, cell index). Returns nullopt
/// when the goal is unreachable. Throws InvalidArgument if start or goal is
/// not passable.
std::optional<Path> astar(const NavGrid& grid, Cell start, Cell goal);

/// Seconds to traverse a path: cost_in_cells * cell_size / speed.
double travel_time(const Path& path, double speed, double cell_size);

/// Pairwise travel time matrix between points (seconds), A* per pair.
/// Unreachable pairs are +infinity. Row/column 0 is `start`.
std::vector<std::vector<double>> travel_time_matrix(const NavGrid& grid, Cell start, const std::vector<Cell>& targets,
                                                    double speed);

}  // namespace homebot::planning
