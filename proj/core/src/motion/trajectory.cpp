#include "homebot/motion/trajectory.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "homebot/error.hpp"

namespace homebot::motion {

Trajectory seed_straight(const Eigen::VectorXd& start, const Eigen::VectorXd& goal, int n, double dt_waypoint) {
  if (n < 3) throw InvalidArgument("seed_straight: need at least 3 waypoints");
  if (start.size() != goal.size() || (start.size() != 2 && start.size() != 3))
    throw InvalidArgument("seed_straight: start and goal must both be 2D or 3D");
  Trajectory t;
  t.dt_waypoint = dt_waypoint;
  t.waypoints.resize(n, start.size());
  for (int i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) / (n - 1);
    t.waypoints.row(i) = (start + s * (goal - start)).transpose();
  }
  t.waypoints.row(0) = start.transpose();
  t.waypoints.row(n - 1) = goal.transpose();
  return t;
}

Eigen::VectorXd playful_normal(const Eigen::VectorXd& direction) {
  const Eigen::VectorXd d = direction.normalized();
  if (d.size() == 2) return Eigen::Vector2d(-d.y(), d.x());
  Eigen::Vector3d up(0.0, 0.0, 1.0);
  Eigen::Vector3d n = up - up.dot(d) * Eigen::Vector3d(d);
  if (n.norm() < 1e-9) {
    const Eigen::Vector3d x(1.0, 0.0, 0.0);
    n = x - x.dot(d) * Eigen::Vector3d(d);
  }
  return n.normalized();
}

PlayfulTargets playful_offsets(const Trajectory& traj, double amplitude) {
  const Eigen::Index n = traj.size();
  const Eigen::VectorXd start = traj.waypoints.row(0).transpose();
  const Eigen::VectorXd goal = traj.waypoints.row(n - 1).transpose();
  const Trajectory straight = seed_straight(start, goal, static_cast<int>(n), traj.dt_waypoint);
  PlayfulTargets out;
  out.points = straight.waypoints;
  const Eigen::VectorXd dir = goal - start;
  if (dir.norm() < 1e-12) {
    out.degenerate = true;
    return out;
  }
  const Eigen::VectorXd normal = playful_normal(dir);
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    const double w = std::sin(std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1));
    out.points.row(i) += (amplitude * w * normal).transpose();
  }
  return out;
}

double smoothness_cost(const Trajectory& traj) {
  const auto& x = traj.waypoints;
  const Eigen::Index n = x.rows();
  return (x.bottomRows(n - 1) - x.topRows(n - 1)).squaredNorm();
}

double objective(const Trajectory& traj, const Eigen::MatrixXd& targets, double play_weight) {
  return smoothness_cost(traj) + play_weight * (traj.waypoints - targets).squaredNorm();
}

Eigen::MatrixXd objective_gradient(const Trajectory& traj, const Eigen::MatrixXd& targets, double play_weight) {
  const auto& x = traj.waypoints;
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, x.cols());
  for (Eigen::Index i = 1; i + 1 < n; ++i)
    g.row(i) = 2.0 * (2.0 * x.row(i) - x.row(i - 1) - x.row(i + 1)) + 2.0 * play_weight * (x.row(i) - targets.row(i));
  return g;
}

namespace {

void clamp_to_bounds(Eigen::MatrixXd& x, const WorkspaceBounds& b) {
  if (b.lower.size() != x.cols() || b.upper.size() != x.cols()) return;
  for (Eigen::Index i = 1; i + 1 < x.rows(); ++i)
    for (Eigen::Index d = 0; d < x.cols(); ++d) x(i, d) = std::clamp(x(i, d), b.lower(d), b.upper(d));
}

}  // namespace

OptimizeResult optimize(const Trajectory& traj, const PlayfulParams& p) {
  if (traj.size() < 3) throw InvalidArgument("optimize: trajectory needs at least 3 waypoints");
  if (!(p.step_size > 0.0)) throw InvalidArgument("optimize: step size must be positive");
  if (p.amplitude < 0.0 || p.play_weight < 0.0) throw InvalidArgument("optimize: amplitude and weight must be non-negative");

  const auto targets = playful_offsets(traj, p.amplitude);
  OptimizeResult res;
  res.trajectory = traj;
  res.report.degenerate = targets.degenerate;
  Eigen::MatrixXd& x = res.trajectory.waypoints;
  const Eigen::Index n = x.rows();
  const Eigen::Index m = n - 2;

  // Smoothness metric on interior waypoints: tridiag(-1, 2, -1).
  Eigen::MatrixXd metric = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    metric(i, i) = 2.0;
    if (i + 1 < m) metric(i, i + 1) = metric(i + 1, i) = -1.0;
  }
  const Eigen::LDLT<Eigen::MatrixXd> metric_ldlt(metric);

  double u = objective(res.trajectory, targets.points, p.play_weight);
  if (!std::isfinite(u)) throw Error("optimize: objective is not finite at the seed");
  res.report.objective_history.push_back(u);
  double eta = p.step_size;
  for (int it = 0; it < p.max_iterations; ++it) {
    const Eigen::MatrixXd grad = objective_gradient(res.trajectory, targets.points, p.play_weight);
    if (grad.squaredNorm() == 0.0) {
      res.report.converged = true;
      break;
    }
    const Eigen::MatrixXd direction = metric_ldlt.solve(grad.middleRows(1, m));
    // Armijo condition: an equal-objective reflection is not progress.
    const double slope = (grad.middleRows(1, m).array() * direction.array()).sum();
    bool accepted = false;
    double step = std::min(p.step_size, 2.0 * eta);
    for (int halving = 0; halving < 64; ++halving, step *= 0.5) {
      Trajectory cand = res.trajectory;
      cand.waypoints.middleRows(1, m) -= step * direction;
      clamp_to_bounds(cand.waypoints, p.bounds);
      const double uc = objective(cand, targets.points, p.play_weight);
      if (!std::isfinite(uc)) throw Error("optimize: objective became non-finite at iteration " + std::to_string(it));
      if (uc <= u - 1e-4 * step * slope) {
        const double moved = (cand.waypoints - x).cwiseAbs().maxCoeff();
        x = cand.waypoints;
        u = uc;
        eta = step;
        accepted = true;
        res.report.objective_history.push_back(u);
        res.report.iterations = it + 1;
        if (moved < p.tolerance) res.report.converged = true;
        break;
      }
      ++res.report.rejected_steps;
    }
    if (!accepted) {
      res.report.converged = true;
      break;
    }
    if (res.report.converged) break;
  }
  return res;
}

GuidelineReport check_guidelines(const Trajectory& traj, const PlayfulParams& p, const Eigen::VectorXd& goal) {
  GuidelineReport r;
  const Eigen::Index n = traj.size();
  const bool at_goal = goal.size() == traj.dims() && (traj.waypoints.row(n - 1).transpose() - goal).norm() < 1e-6;
  r.helpful = at_goal;
  r.clear = at_goal;
  bool inside = true;
  if (p.bounds.lower.size() == traj.dims() && p.bounds.upper.size() == traj.dims()) {
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index d = 0; d < traj.dims(); ++d)
        if (traj.waypoints(i, d) < p.bounds.lower(d) || traj.waypoints(i, d) > p.bounds.upper(d)) inside = false;
  }
  double max_step = 0.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i)
    max_step = std::max(max_step, (traj.waypoints.row(i + 1) - traj.waypoints.row(i)).norm());
  r.safe = inside && traj.dt_waypoint > 0.0 && max_step / traj.dt_waypoint <= p.velocity_limit;
  return r;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream out;
  out << (traj.dims() == 3 ? "t,x,y,z\n" : "t,x,y\n");
  out << std::setprecision(10);
  for (Eigen::Index i = 0; i < traj.size(); ++i) {
    out << static_cast<double>(i) * traj.dt_waypoint;
    for (Eigen::Index d = 0; d < traj.dims(); ++d) out << ',' << traj.waypoints(i, d);
    out << '\n';
  }
  return out.str();
}

}  // namespace homebot::motion
