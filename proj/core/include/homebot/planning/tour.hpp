#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "homebot/sensors/sensors.hpp"

namespace homebot::planning {

struct HelpNode {
  std::string id;
  world::Vec2 position = world::Vec2::Zero();
  double reward = 0.0;  // expected helpfulness
  bool visited = false;
};

/// Travel time between tour points. Index 0 is the robot's start; node i
/// of the node list is index i + 1.
using CostMatrix = std::vector<std::vector<double>>;

struct TourPlan {
  std::vector<std::size_t> order;  // indices into the node list
  std::vector<std::string> ids;
  double total_reward = 0.0;
  double total_cost = 0.0;  // seconds
  double budget = 0.0;
};

/// Cost of visiting `order` from the start without returning.
double tour_cost(const CostMatrix& cost, const std::vector<std::size_t>& order);
/// Sum of first-visit rewards; visited nodes contribute nothing.
double tour_reward(const std::vector<HelpNode>& nodes, const std::vector<std::size_t>& order);

/// Orienteering heuristic: greedy cheapest-ratio insertion (reward over
/// added travel time) alternating with 2-opt and swap improvement, run from
/// several ratio exponents; the best feasible plan wins. Never exceeds the
/// budget; an empty tour is valid.
TourPlan plan_tour(const std::vector<HelpNode>& nodes, const CostMatrix& cost, double budget);

struct BruteForceStats {
  std::uint64_t prefixes = 0;  // ordered prefixes examined, including the empty one
};

/// Exact optimum by enumerating every ordered subset within budget. Ties go
/// to the lexicographically smallest order. Throws InvalidArgument for more
/// than 10 nodes.
TourPlan brute_force_tour(const std::vector<HelpNode>& nodes, const CostMatrix& cost, double budget,
                          BruteForceStats* stats = nullptr);

/// Re-plans with the remaining budget (budget - elapsed) over the current
/// node set. Nodes already rewarded (flagged visited, or listed in
/// `rewarded`) carry reward 0. Throws InvalidArgument if elapsed > budget.
TourPlan replan(std::vector<HelpNode> nodes_now, const CostMatrix& cost, const TourPlan& plan, double elapsed,
                const std::vector<std::string>& rewarded = {});

struct HelpfulnessParams {
  double w_dist = 1.0;
  double w_adult = 1.0;
  double face_width_prior = 0.15;  // metres
  double d_max = 5.0;              // metres
  double h_adult = 1.1;            // metres
};

struct HelpfulnessScore {
  double distance_estimate = 0.0;
  double proximity = 0.0;
  double adult = 0.0;
  double reward = 0.0;
};

/// reward = w_dist * clamp(1 - d_est / d_max, 0, 1) + w_adult * [height >= h_adult],
/// with d_est = face_width_prior / apparent_width.
HelpfulnessScore helpfulness(const sensors::PerceivedFace& face, const HelpfulnessParams& p = {});

/// Face-derived help node: position from the estimated range and bearing.
HelpNode help_node_from_face(const sensors::PerceivedFace& face, const sensors::RobotPose& pose,
                             const HelpfulnessParams& p = {});

}  // namespace homebot::planning
