#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace homebot::motion {

/// Fixed-endpoint waypoint sequence, one row per waypoint (2 or 3 columns).
struct Trajectory {
  Eigen::MatrixXd waypoints;
  double dt_waypoint = 0.1;  // seconds between waypoints

  [[nodiscard]] Eigen::Index size() const { return waypoints.rows(); }
  [[nodiscard]] Eigen::Index dims() const { return waypoints.cols(); }
};

struct WorkspaceBounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

struct PlayfulParams {
  double amplitude = 0.2;       // metres
  double play_weight = 1.0;     // lambda
  double step_size = 1.0;       // initial eta; halved while the objective would not decrease
  int max_iterations = 5000;
  double tolerance = 1e-10;     // stop when no waypoint moves farther than this
  WorkspaceBounds bounds;       // empty vectors: unbounded
  double velocity_limit = 1.0;  // m/s
};

/// Waypoints evenly spaced on the segment start -> goal. Throws
/// InvalidArgument for n < 3 or mismatched dimensions.
Trajectory seed_straight(const Eigen::VectorXd& start, const Eigen::VectorXd& goal, int n, double dt_waypoint = 0.1);

struct PlayfulTargets {
  Eigen::MatrixXd points;
  bool degenerate = false;  // start == goal: no normal, targets are the straight seed
};

/// Unit normal used for the playful arc. In 2D it is the start->goal
/// direction rotated +90 degrees; in 3D it is the component of +z
/// orthogonal to that direction (an arc in the vertical plane), falling
/// back to +x when the motion is vertical.
Eigen::VectorXd playful_normal(const Eigen::VectorXd& direction);

/// c_i = straight point + A * sin(pi * i / (N - 1)) * n, endpoints unchanged.
PlayfulTargets playful_offsets(const Trajectory& traj, double amplitude);

/// U = sum ||x_{i+1} - x_i||^2 + lambda * sum ||x_i - c_i||^2.
double smoothness_cost(const Trajectory& traj);
double objective(const Trajectory& traj, const Eigen::MatrixXd& targets, double play_weight);
/// dU/dx for interior waypoints; endpoint rows are zero.
Eigen::MatrixXd objective_gradient(const Trajectory& traj, const Eigen::MatrixXd& targets, double play_weight);

struct OptimizeReport {
  int iterations = 0;
  int rejected_steps = 0;
  bool converged = false;
  std::vector<double> objective_history;  // U at every accepted iterate, starting with the seed
  bool degenerate = false;
};

struct OptimizeResult {
  Trajectory trajectory;
  OptimizeReport report;
};

/// Covariant gradient descent: x <- x - eta * M^{-1} grad U with M the
/// interior second-difference metric, halving eta until U decreases.
/// Waypoints are clamped to the workspace bounds after each step. Throws
/// Error if the objective becomes non-finite.
OptimizeResult optimize(const Trajectory& traj, const PlayfulParams& p);

struct GuidelineReport {
  bool helpful = false;  // ends at the goal
  bool safe = false;     // inside bounds and under the velocity limit
  bool clear = false;    // ends at the goal
};

GuidelineReport check_guidelines(const Trajectory& traj, const PlayfulParams& p, const Eigen::VectorXd& goal);

/// Point-light trace: header `t,x,y[,z]`, one row per waypoint.
std::string trajectory_csv(const Trajectory& traj);

}  // namespace homebot::motion
