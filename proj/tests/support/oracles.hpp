#pragma once

// Reference implementations the library is checked against. They share no
// code with the library and favour obviousness over speed.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>
#include <vector>

#include <Eigen/Dense>

#include "homebot/triage/triage.hpp"

namespace oracle {

/// Move counts of a grid path; ordered by their exact length a + b*sqrt(2).
struct Moves {
  long straight = 0;
  long diagonal = 0;
  [[nodiscard]] double length() const { return static_cast<double>(straight) + std::sqrt(2.0) * static_cast<double>(diagonal); }
};

/// Plain Dijkstra over an 8-connected grid. A diagonal move needs a free
/// target and at least one free orthogonal neighbour on the way.
inline std::optional<Moves> dijkstra(int w, int h, const std::vector<bool>& free, int sx, int sy, int gx, int gy) {
  const auto idx = [w](int x, int y) { return static_cast<std::size_t>(y * w + x); };
  const auto ok = [&](int x, int y) { return x >= 0 && y >= 0 && x < w && y < h && free[idx(x, y)]; };
  std::vector<std::optional<Moves>> best(free.size());
  std::vector<bool> done(free.size(), false);
  best[idx(sx, sy)] = Moves{};
  for (;;) {
    // Linear scan for the closest open cell; the grids here are tiny.
    std::size_t pick = free.size();
    for (std::size_t i = 0; i < free.size(); ++i)
      if (!done[i] && best[i] && (pick == free.size() || best[i]->length() < best[pick]->length())) pick = i;
    if (pick == free.size()) break;
    done[pick] = true;
    const int x = static_cast<int>(pick) % w, y = static_cast<int>(pick) / w;
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy) {
        if (dx == 0 && dy == 0) continue;
        const int nx = x + dx, ny = y + dy;
        if (!ok(nx, ny)) continue;
        const bool diag = dx != 0 && dy != 0;
        if (diag && !ok(x + dx, y) && !ok(x, y + dy)) continue;
        Moves m = *best[pick];
        (diag ? m.diagonal : m.straight) += 1;
        auto& slot = best[idx(nx, ny)];
        if (!slot || m.length() < slot->length() - 1e-12) slot = m;
      }
  }
  return best[idx(gx, gy)];
}

/// Exhaustive orienteering optimum: best reward over every ordered subset
/// whose open tour from index 0 fits the budget.
inline double best_tour_reward(const std::vector<double>& reward, const std::vector<std::vector<double>>& cost,
                               double budget) {
  const std::size_t n = reward.size();
  double best = 0.0;
  std::vector<bool> used(n, false);
  auto dfs = [&](auto&& self, std::size_t at, double spent, double gained) -> void {
    best = std::max(best, gained);
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j]) continue;
      const double c = spent + cost[at][j + 1];
      if (c > budget) continue;
      used[j] = true;
      self(self, j + 1, c, gained + reward[j]);
      used[j] = false;
    }
  };
  dfs(dfs, 0, 0.0, 0.0);
  return best;
}

/// Minimizer of sum ||x_{i+1} - x_i||^2 + lambda * sum ||x_i - c_i||^2 with
/// fixed endpoints, from the normal equations of the interior waypoints.
inline Eigen::MatrixXd quadratic_optimum(const Eigen::MatrixXd& targets, const Eigen::RowVectorXd& start,
                                         const Eigen::RowVectorXd& goal, double lambda) {
  const Eigen::Index n = targets.rows();
  const Eigen::Index m = n - 2;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd b(m, targets.cols());
  for (Eigen::Index i = 0; i < m; ++i) {
    a(i, i) = 2.0 + lambda;
    if (i > 0) a(i, i - 1) = -1.0;
    if (i + 1 < m) a(i, i + 1) = -1.0;
    b.row(i) = lambda * targets.row(i + 1);
  }
  b.row(0) += start;
  b.row(m - 1) += goal;
  Eigen::MatrixXd x(n, targets.cols());
  x.row(0) = start;
  x.row(n - 1) = goal;
  x.middleRows(1, m) = a.fullPivLu().solve(b);
  return x;
}

/// Priority table written as a count of findings per severity class.
inline homebot::triage::Priority priority(homebot::triage::Circulation c, homebot::triage::Airway a,
                                          homebot::triage::Breathing b, homebot::triage::BleedSeverity s) {
  using namespace homebot::triage;
  const bool cyanotic = c == Circulation::Cyanotic;
  const bool at_risk = a == Airway::ObstructedRisk;
  const std::array<bool, 4> critical{b == Breathing::Absent, b == Breathing::Agonal, s == BleedSeverity::Massive,
                                     cyanotic && at_risk};
  if (std::count(critical.begin(), critical.end(), true) > 0) return Priority::Red;
  const std::array<bool, 4> abnormal{cyanotic, at_risk, b != Breathing::Normal, s != BleedSeverity::None};
  if (std::count(abnormal.begin(), abnormal.end(), true) > 0) return Priority::Yellow;
  return Priority::Green;
}

}  // namespace oracle
