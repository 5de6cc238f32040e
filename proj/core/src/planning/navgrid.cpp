#include "homebot/planning/navgrid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <tuple>

#include "homebot/error.hpp"

namespace homebot::planning {

NavGrid::NavGrid(const world::HomeMap& map)
    : width_(map.width()), height_(map.height()), cell_size_(map.cell_size()) {
  passable_.resize(static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_));
  for (int y = 0; y < height_; ++y)
    for (int x = 0; x < width_; ++x) passable_[index({x, y})] = map.is_free({x, y});
}

NavGrid::NavGrid(int width, int height, std::vector<bool> passable, double cell_size)
    : width_(width), height_(height), cell_size_(cell_size), passable_(std::move(passable)) {
  if (passable_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw InvalidArgument("NavGrid: passability vector does not match dimensions");
}

std::vector<NavGrid::Neighbor> NavGrid::neighbors(Cell c) const {
  static constexpr std::array<std::array<int, 2>, 8> kMoves{
      {{1, 0}, {0, 1}, {-1, 0}, {0, -1}, {1, 1}, {-1, 1}, {-1, -1}, {1, -1}}};
  std::vector<Neighbor> out;
  out.reserve(8);
  for (const auto& [dx, dy] : kMoves) {
    const Cell n{c.x + dx, c.y + dy};
    if (!passable(n)) continue;
    const bool diagonal = dx != 0 && dy != 0;
    if (diagonal && !passable({c.x + dx, c.y}) && !passable({c.x, c.y + dy})) continue;
    out.push_back({n, diagonal});
  }
  return out;
}

namespace {

StepCost octile(Cell a, Cell b) {
  const long dx = std::abs(a.x - b.x);
  const long dy = std::abs(a.y - b.y);
  return {std::max(dx, dy) - std::min(dx, dy), std::min(dx, dy)};
}

StepCost add(StepCost a, bool diagonal) {
  if (diagonal)
    ++a.diagonal;
  else
    ++a.straight;
  return a;
}

}  // namespace

std::optional<Path> astar(const NavGrid& grid, Cell start, Cell goal) {
  if (!grid.passable(start)) throw InvalidArgument("astar: start cell is not passable");
  if (!grid.passable(goal)) throw InvalidArgument("astar: goal cell is not passable");

  const std::size_t n = grid.size();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<StepCost> g(n);
  std::vector<double> gval(n, kInf);
  std::vector<std::size_t> parent(n, n);
  std::vector<bool> closed(n, false);

  using Entry = std::tuple<double, double, std::size_t>;  // f, h, index
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  const std::size_t s = grid.index(start);
  const std::size_t t = grid.index(goal);
  g[s] = {};
  gval[s] = 0.0;
  const double h0 = octile(start, goal).value();
  open.emplace(h0, h0, s);

  while (!open.empty()) {
    const auto [f, h, u] = open.top();
    open.pop();
    if (closed[u]) continue;
    closed[u] = true;
    if (u == t) break;
    for (const auto& nb : grid.neighbors(grid.cell(u))) {
      const std::size_t v = grid.index(nb.cell);
      if (closed[v]) continue;
      const StepCost cand = add(g[u], nb.diagonal);
      const double cv = cand.value();
      if (cv < gval[v]) {
        g[v] = cand;
        gval[v] = cv;
        parent[v] = u;
        const double hv = octile(nb.cell, goal).value();
        open.emplace(cv + hv, hv, v);
      }
    }
  }
  if (!closed[t]) return std::nullopt;

  Path path;
  path.steps = g[t];
  for (std::size_t v = t; v != n; v = parent[v]) {
    path.cells.push_back(grid.cell(v));
    if (v == s) break;
  }
  std::reverse(path.cells.begin(), path.cells.end());
  return path;
}

double travel_time(const Path& path, double speed, double cell_size) {
  if (!(speed > 0.0)) throw InvalidArgument("travel_time: speed must be positive");
  return path.total_cost() * cell_size / speed;
}

std::vector<std::vector<double>> travel_time_matrix(const NavGrid& grid, Cell start, const std::vector<Cell>& targets,
                                                    double speed) {
  std::vector<Cell> pts{start};
  pts.insert(pts.end(), targets.begin(), targets.end());
  const std::size_t m = pts.size();
  std::vector<std::vector<double>> cost(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      const auto p = astar(grid, pts[i], pts[j]);
      const double c = p ? travel_time(*p, speed, grid.cell_size()) : std::numeric_limits<double>::infinity();
      cost[i][j] = cost[j][i] = c;
    }
  return cost;
}

}  // namespace homebot::planning
