#pragma once

// Random inputs and signal builders shared by the unit and acceptance tests.

#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "homebot/detection/trend.hpp"
#include "homebot/motion/glyphs.hpp"
#include "homebot/motion/trajectory.hpp"
#include "homebot/planning/tour.hpp"
#include "homebot/rng.hpp"

namespace gen {

using homebot::sensors::GasSample;

/// Rise toward base + amp with tau 2 s for `rise` seconds, then decay with
/// tau 60 s. Returns the samples and the index of the first decaying sample.
inline std::pair<std::vector<GasSample>, std::size_t> rise_then_decay(double base, double amp, double rise,
                                                                      double decay, double dt) {
  std::vector<GasSample> s;
  std::size_t junction = 0;
  const double peak = base + amp * (1.0 - std::exp(-rise / 2.0));
  for (int i = 0;; ++i) {
    const double t = i * dt;
    if (t > rise + decay + 1e-9) break;
    if (t <= rise + 1e-9) {
      s.push_back({t, base + amp * (1.0 - std::exp(-t / 2.0))});
    } else {
      if (junction == 0) junction = s.size();
      s.push_back({t, base + (peak - base) * std::exp(-(t - rise) / 60.0)});
    }
  }
  return {s, junction};
}

/// 60 samples of a*exp(b t) + c with a random decaying rate.
inline std::vector<GasSample> single_exponential(homebot::Rng& rng, double dt) {
  std::vector<GasSample> s;
  const double a = rng.uniform(-50, 50), b = -1.0 / rng.uniform(1, 100), c = rng.uniform(50, 150);
  for (int i = 0; i < 60; ++i) s.push_back({i * dt, a * std::exp(b * i * dt) + c});
  return s;
}

/// The split with the least two-piece squared residual.
inline std::size_t best_split(const std::vector<GasSample>& s) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t at = 0;
  for (std::size_t k = 3; k + 3 <= s.size(); ++k) {
    const auto l = homebot::detection::fit_segment(s, 0, k), r = homebot::detection::fit_segment(s, k, s.size());
    const double total = l.residual * l.residual * double(l.size()) + r.residual * r.residual * double(r.size());
    if (total < best) {
      best = total;
      at = k;
    }
  }
  return at;
}

inline homebot::planning::CostMatrix euclidean_costs(const std::vector<homebot::world::Vec2>& pts, double speed) {
  homebot::planning::CostMatrix c(pts.size(), std::vector<double>(pts.size(), 0.0));
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j) c[i][j] = (pts[i] - pts[j]).norm() / speed;
  return c;
}

struct TourInstance {
  std::vector<homebot::planning::HelpNode> nodes;
  homebot::planning::CostMatrix cost;
  double budget = 0.0;
};

/// Start and n nodes uniform in a 3 m square, rewards in [0, 2], budget in
/// [0, 30] s at 0.3 m/s.
inline TourInstance random_tour_instance(homebot::Rng& rng, int n) {
  TourInstance in;
  std::vector<homebot::world::Vec2> pts{homebot::world::Vec2(rng.uniform(0, 3), rng.uniform(0, 3))};
  for (int i = 0; i < n; ++i) {
    pts.emplace_back(rng.uniform(0, 3), rng.uniform(0, 3));
    in.nodes.push_back({"n" + std::to_string(i), pts.back(), rng.uniform(0.0, 2.0), false});
  }
  in.cost = euclidean_costs(pts, 0.3);
  in.budget = rng.uniform(0.0, 30.0);
  return in;
}

inline std::vector<double> rewards(const std::vector<homebot::planning::HelpNode>& nodes) {
  std::vector<double> r;
  for (const auto& n : nodes) r.push_back(n.reward);
  return r;
}

/// Straight seed with Gaussian jitter on the interior waypoints.
inline homebot::motion::Trajectory random_trajectory(homebot::Rng& rng, int n, int dims) {
  Eigen::VectorXd s(dims), g(dims);
  for (int d = 0; d < dims; ++d) {
    s(d) = rng.uniform(-1, 1);
    g(d) = rng.uniform(-1, 1);
  }
  auto t = homebot::motion::seed_straight(s, g, n);
  for (Eigen::Index i = 1; i + 1 < t.size(); ++i)
    for (int d = 0; d < dims; ++d) t.waypoints(i, d) += rng.normal(0.0, 0.2);
  return t;
}

inline Eigen::MatrixXd central_difference(const homebot::motion::Trajectory& t, const Eigen::MatrixXd& targets,
                                          double lambda, double h) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(t.size(), t.dims());
  for (Eigen::Index i = 1; i + 1 < t.size(); ++i)
    for (Eigen::Index d = 0; d < t.dims(); ++d) {
      auto up = t, down = t;
      up.waypoints(i, d) += h;
      down.waypoints(i, d) -= h;
      g(i, d) = (homebot::motion::objective(up, targets, lambda) - homebot::motion::objective(down, targets, lambda)) /
                (2.0 * h);
    }
  return g;
}

using SegmentKey = std::tuple<long, long, long, long>;

/// Strokes of a glyph in quarter-cell units, endpoints ordered, as a set.
inline std::set<SegmentKey> segment_set(char ch) {
  const auto g = homebot::motion::glyph_strokes(ch, {Eigen::Vector2d(0, 0), Eigen::Vector2d(0.5, 0.5)});
  std::set<SegmentKey> out;
  for (const auto& s : g.segments) {
    auto p = std::make_pair(std::lround(s.a.x() * 4), std::lround(s.a.y() * 4));
    auto q = std::make_pair(std::lround(s.b.x() * 4), std::lround(s.b.y() * 4));
    if (q < p) std::swap(p, q);
    out.insert({p.first, p.second, q.first, q.second});
  }
  return out;
}

inline const std::string kGlyphAlphabet = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";

}  // namespace gen
