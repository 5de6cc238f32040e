#include "homebot/planning/tour.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "homebot/error.hpp"

namespace homebot::planning {

namespace {

constexpr double kFeasEps = 1e-9;

double node_reward(const HelpNode& n) { return n.visited ? 0.0 : std::max(0.0, n.reward); }

double leg(const CostMatrix& cost, std::size_t from_point, std::size_t to_node) { return cost[from_point][to_node + 1]; }

void check_matrix(const std::vector<HelpNode>& nodes, const CostMatrix& cost) {
  if (cost.size() != nodes.size() + 1) throw InvalidArgument("tour: cost matrix must be (n+1)x(n+1)");
  for (const auto& row : cost)
    if (row.size() != nodes.size() + 1) throw InvalidArgument("tour: cost matrix must be (n+1)x(n+1)");
}

TourPlan make_plan(const std::vector<HelpNode>& nodes, const CostMatrix& cost, std::vector<std::size_t> order,
                   double budget) {
  TourPlan p;
  p.order = std::move(order);
  for (auto i : p.order) p.ids.push_back(nodes[i].id);
  p.total_reward = tour_reward(nodes, p.order);
  p.total_cost = tour_cost(cost, p.order);
  p.budget = budget;
  return p;
}

// Point index (0 = start) of the tour element before position `pos`.
std::size_t point_before(const std::vector<std::size_t>& order, std::size_t pos) {
  return pos == 0 ? 0 : order[pos - 1] + 1;
}

// Added cost of inserting node k at position pos (before order[pos]).
double insertion_delta(const CostMatrix& cost, const std::vector<std::size_t>& order, std::size_t pos, std::size_t k) {
  const std::size_t prev = point_before(order, pos);
  double d = leg(cost, prev, k);
  if (pos < order.size()) d += cost[k + 1][order[pos] + 1] - cost[prev][order[pos] + 1];
  return d;
}

struct Insertion {
  std::size_t node = 0;
  std::size_t pos = 0;
  double delta = 0.0;
  double score = -1.0;
};

class TourBuilder {
 public:
  TourBuilder(const std::vector<HelpNode>& nodes, const CostMatrix& cost, double budget, double exponent)
      : nodes_(nodes), cost_(cost), budget_(budget), exponent_(exponent), in_tour_(nodes.size(), false) {}

  // `first` seeds the tour with one node when it fits the budget alone.
  std::vector<std::size_t> run(std::size_t first) {
    if (first < nodes_.size() && node_reward(nodes_[first]) > 0.0 && leg(cost_, 0, first) <= budget_ + kFeasEps) {
      order_.push_back(first);
      in_tour_[first] = true;
    }
    bool improved = true;
    int rounds = 0;
    while (improved && ++rounds < 100) {
      improved = insert_greedily();
      improved = reduce_cost() || improved;
      improved = swap_for_reward() || improved;
    }
    return order_;
  }

 private:
  double current_cost() const { return tour_cost(cost_, order_); }

  bool insert_greedily() {
    bool any = false;
    for (;;) {
      const double base = current_cost();
      Insertion best;
      for (std::size_t k = 0; k < nodes_.size(); ++k) {
        if (in_tour_[k]) continue;
        const double r = node_reward(nodes_[k]);
        if (r <= 0.0) continue;
        for (std::size_t pos = 0; pos <= order_.size(); ++pos) {
          const double delta = insertion_delta(cost_, order_, pos, k);
          if (!std::isfinite(delta) || base + delta > budget_ + kFeasEps) continue;
          const double score = r / std::pow(std::max(delta, 1e-12), exponent_);
          // Equal scores keep the later slot so earlier, richer stops stay first.
          const bool tie = best.node == k && std::abs(score - best.score) <= 1e-12 * std::max(1.0, std::abs(score));
          if (score > best.score && !tie) best = {k, pos, delta, score};
          else if (tie) best.pos = pos;
        }
      }
      if (best.score < 0.0) return any;
      order_.insert(order_.begin() + static_cast<std::ptrdiff_t>(best.pos), best.node);
      in_tour_[best.node] = true;
      any = true;
    }
  }

  // 2-opt reversals and single-node relocation while they shorten the tour.
  bool reduce_cost() {
    bool any = false;
    bool improved = true;
    while (improved) {
      improved = false;
      double best = current_cost();
      for (std::size_t i = 0; i + 1 < order_.size() && !improved; ++i)
        for (std::size_t j = i + 1; j < order_.size() && !improved; ++j) {
          auto cand = order_;
          std::reverse(cand.begin() + static_cast<std::ptrdiff_t>(i), cand.begin() + static_cast<std::ptrdiff_t>(j) + 1);
          const double c = tour_cost(cost_, cand);
          if (c < best - 1e-12) {
            order_ = std::move(cand);
            best = c;
            improved = any = true;
          }
        }
      for (std::size_t i = 0; i < order_.size() && !improved; ++i)
        for (std::size_t j = 0; j < order_.size() && !improved; ++j) {
          if (i == j) continue;
          auto cand = order_;
          const auto node = cand[i];
          cand.erase(cand.begin() + static_cast<std::ptrdiff_t>(i));
          cand.insert(cand.begin() + static_cast<std::ptrdiff_t>(j), node);
          const double c = tour_cost(cost_, cand);
          if (c < best - 1e-12) {
            order_ = std::move(cand);
            best = c;
            improved = any = true;
          }
        }
    }
    return any;
  }

  // Replace one tour node by an outside node of higher reward when the
  // result (cheapest re-insertion) stays within budget.
  bool swap_for_reward() {
    for (std::size_t i = 0; i < order_.size(); ++i) {
      const std::size_t out = order_[i];
      auto without = order_;
      without.erase(without.begin() + static_cast<std::ptrdiff_t>(i));
      const double base = tour_cost(cost_, without);
      for (std::size_t k = 0; k < nodes_.size(); ++k) {
        if (in_tour_[k] || node_reward(nodes_[k]) <= node_reward(nodes_[out])) continue;
        for (std::size_t pos = 0; pos <= without.size(); ++pos) {
          const double delta = insertion_delta(cost_, without, pos, k);
          if (!std::isfinite(delta) || base + delta > budget_ + kFeasEps) continue;
          without.insert(without.begin() + static_cast<std::ptrdiff_t>(pos), k);
          order_ = std::move(without);
          in_tour_[out] = false;
          in_tour_[k] = true;
          return true;
        }
      }
    }
    return false;
  }

  const std::vector<HelpNode>& nodes_;
  const CostMatrix& cost_;
  double budget_;
  double exponent_;
  std::vector<std::size_t> order_;
  std::vector<bool> in_tour_;
};

bool better(const TourPlan& a, const TourPlan& b) {
  if (a.total_reward > b.total_reward + 1e-12) return true;
  if (a.total_reward < b.total_reward - 1e-12) return false;
  if (a.total_cost < b.total_cost - 1e-12) return true;
  if (a.total_cost > b.total_cost + 1e-12) return false;
  return a.order < b.order;
}

}  // namespace

double tour_cost(const CostMatrix& cost, const std::vector<std::size_t>& order) {
  double c = 0.0;
  std::size_t prev = 0;
  for (auto k : order) {
    c += cost[prev][k + 1];
    prev = k + 1;
  }
  return c;
}

double tour_reward(const std::vector<HelpNode>& nodes, const std::vector<std::size_t>& order) {
  double r = 0.0;
  std::vector<bool> seen(nodes.size(), false);
  for (auto k : order) {
    if (seen[k]) continue;
    seen[k] = true;
    r += node_reward(nodes[k]);
  }
  return r;
}

TourPlan plan_tour(const std::vector<HelpNode>& nodes, const CostMatrix& cost, double budget) {
  if (budget < 0.0) throw InvalidArgument("plan_tour: budget must be non-negative");
  check_matrix(nodes, cost);
  TourPlan best = make_plan(nodes, cost, {}, budget);
  // Restarts: each insertion exponent, from an empty tour and from every
  // single-node tour.
  for (double exponent : {1.0, 0.5, 2.0, 0.0})
    for (std::size_t first = 0; first <= nodes.size(); ++first) {
      TourBuilder builder(nodes, cost, budget, exponent);
      TourPlan cand = make_plan(nodes, cost, builder.run(first == 0 ? nodes.size() : first - 1), budget);
      if (cand.total_cost <= budget + kFeasEps && better(cand, best)) best = std::move(cand);
    }
  return best;
}

TourPlan brute_force_tour(const std::vector<HelpNode>& nodes, const CostMatrix& cost, double budget,
                          BruteForceStats* stats) {
  if (nodes.size() > 10) throw InvalidArgument("brute_force_tour: at most 10 nodes");
  if (budget < 0.0) throw InvalidArgument("brute_force_tour: budget must be non-negative");
  check_matrix(nodes, cost);

  std::vector<std::size_t> prefix;
  std::vector<bool> used(nodes.size(), false);
  std::vector<std::size_t> best_order;
  double best_reward = 0.0;
  std::uint64_t count = 0;

  auto dfs = [&](auto&& self, double spent, double reward) -> void {
    ++count;
    if (reward > best_reward) {
      best_reward = reward;
      best_order = prefix;
    }
    const std::size_t here = prefix.empty() ? 0 : prefix.back() + 1;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      if (used[k]) continue;
      const double c = spent + cost[here][k + 1];
      if (!(c <= budget + kFeasEps)) continue;
      used[k] = true;
      prefix.push_back(k);
      self(self, c, reward + node_reward(nodes[k]));
      prefix.pop_back();
      used[k] = false;
    }
  };
  dfs(dfs, 0.0, 0.0);
  if (stats) stats->prefixes = count;
  return make_plan(nodes, cost, best_order, budget);
}

TourPlan replan(std::vector<HelpNode> nodes_now, const CostMatrix& cost, const TourPlan& plan, double elapsed,
                const std::vector<std::string>& rewarded) {
  if (elapsed > plan.budget + kFeasEps) throw InvalidArgument("replan: elapsed time exceeds the budget");
  for (auto& n : nodes_now)
    if (std::find(rewarded.begin(), rewarded.end(), n.id) != rewarded.end()) n.visited = true;
  return plan_tour(nodes_now, cost, std::max(0.0, plan.budget - elapsed));
}

HelpfulnessScore helpfulness(const sensors::PerceivedFace& face, const HelpfulnessParams& p) {
  if (!(face.apparent_width > 0.0)) throw InvalidArgument("helpfulness: apparent width must be positive");
  HelpfulnessScore s;
  s.distance_estimate = p.face_width_prior / face.apparent_width;
  s.proximity = std::clamp(1.0 - s.distance_estimate / p.d_max, 0.0, 1.0);
  s.adult = face.face_center_height >= p.h_adult ? 1.0 : 0.0;
  s.reward = p.w_dist * s.proximity + p.w_adult * s.adult;
  return s;
}

HelpNode help_node_from_face(const sensors::PerceivedFace& face, const sensors::RobotPose& pose,
                             const HelpfulnessParams& p) {
  const auto s = helpfulness(face, p);
  const double a = pose.heading + face.bearing;
  HelpNode n;
  n.id = face.agent_id;
  n.position = pose.position + s.distance_estimate * world::Vec2(std::cos(a), std::sin(a));
  n.reward = s.reward;
  return n;
}

}  // namespace homebot::planning
