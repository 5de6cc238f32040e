#pragma once

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "homebot/sensors/sensors.hpp"

namespace homebot::detection {

enum class TimeBucket { Night, Morning, Day, Evening };
std::string_view to_string(TimeBucket b);

/// Night 22-6h, Morning 6-10h, Day 10-18h, Evening 18-22h.
TimeBucket time_bucket(double seconds_of_day);

struct RoomActivity {
  std::string room;
  double pressure_dwell = 0.0;      // seconds of pressure occupancy in the window
  double contact_open_count = 0.0;  // contact open events in the window
  double pir_activity = 0.0;        // fraction of window ticks with PIR motion
};

struct AnomalyFeatureVector {
  std::vector<RoomActivity> rooms;
  TimeBucket bucket = TimeBucket::Day;
  double seconds_since_motion = 0.0;

  /// Flat layout: for each room (dwell, opens, pir), then bucket, then
  /// seconds since motion.
  [[nodiscard]] std::vector<double> values() const;
  static std::vector<std::string> names(const std::vector<std::string>& rooms);
};

struct FeatureConfig {
  double window = 300.0;         // seconds
  double sample_period = 0.1;    // world tick, seconds
  double day_start_offset = 0.0; // seconds of day at clock = 0
};

/// Aggregates the events with timestamps in (clock - window, clock].
/// Seconds since motion is measured to the newest PIR event and saturates
/// at the window length when the window holds other events but no motion.
/// An empty window yields all-zero features.
AnomalyFeatureVector extract_features(const std::vector<sensors::SensorEvent>& events, double clock,
                                      const world::HomeMap& map, const FeatureConfig& cfg = {});

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;     // taken when x[feature] <= threshold
  int right = -1;
  bool anomalous = false;  // leaf vote
};

struct DecisionTree {
  std::vector<TreeNode> nodes;
  [[nodiscard]] bool predict(std::span<const double> x) const;
  /// Indices of the nodes visited from the root to the leaf.
  [[nodiscard]] std::vector<int> path(std::span<const double> x) const;
};

struct ForestParams {
  int n_trees = 25;
  int max_depth = 6;
  int min_samples_split = 2;
  int features_per_split = 0;  // 0: round(sqrt(n_features))
  std::uint64_t seed = 1;
};

struct Forest {
  static constexpr int kFormatVersion = 1;
  std::vector<std::string> feature_names;
  std::vector<DecisionTree> trees;

  /// Fraction of trees voting anomalous.
  [[nodiscard]] double score(std::span<const double> x) const;
};

struct LabeledSample {
  AnomalyFeatureVector features;
  bool anomalous = false;
};

/// Bagged CART ensemble (Gini impurity, bootstrap rows, random feature
/// subset per split). Deterministic for a fixed seed. Throws
/// InvalidArgument when only one class is present or n_trees < 1.
Forest train_forest(const std::vector<std::vector<double>>& rows, const std::vector<bool>& labels,
                    std::vector<std::string> feature_names, const ForestParams& params);
Forest train_forest(const std::vector<LabeledSample>& labeled, const ForestParams& params);

struct AnomalyVerdict {
  bool anomalous = false;
  std::string room;
  double score = 0.0;
};

/// score >= 0.5 is anomalous (a tie counts as anomalous). The room is the
/// one whose features most often pushed anomalous-voting trees down their
/// high-value branch; without such evidence, the room with the longest
/// pressure dwell, then the most PIR activity.
AnomalyVerdict classify_anomaly(const Forest& forest, const AnomalyFeatureVector& f);

/// Single-rule reference detector: any pressure dwell above `dwell_limit`.
bool dwell_rule_baseline(const AnomalyFeatureVector& f, double dwell_limit = 120.0);

nlohmann::json to_json(const Forest& forest);
Forest forest_from_json(const nlohmann::json& j);
void save_forest(const Forest& forest, const std::string& path);
Forest load_forest(const std::string& path);

}  // namespace homebot::detection
