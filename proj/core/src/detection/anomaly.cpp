#include "homebot/detection/anomaly.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "homebot/error.hpp"
#include "homebot/rng.hpp"

namespace homebot::detection {

using nlohmann::json;

std::string_view to_string(TimeBucket b) {
  switch (b) {
    case TimeBucket::Night: return "night";
    case TimeBucket::Morning: return "morning";
    case TimeBucket::Day: return "day";
    case TimeBucket::Evening: return "evening";
  }
  return "day";
}

TimeBucket time_bucket(double seconds_of_day) {
  double s = std::fmod(seconds_of_day, 86400.0);
  if (s < 0) s += 86400.0;
  const double h = s / 3600.0;
  if (h < 6.0 || h >= 22.0) return TimeBucket::Night;
  if (h < 10.0) return TimeBucket::Morning;
  if (h < 18.0) return TimeBucket::Day;
  return TimeBucket::Evening;
}

std::vector<double> AnomalyFeatureVector::values() const {
  std::vector<double> v;
  v.reserve(rooms.size() * 3 + 2);
  for (const auto& r : rooms) {
    v.push_back(r.pressure_dwell);
    v.push_back(r.contact_open_count);
    v.push_back(r.pir_activity);
  }
  v.push_back(static_cast<double>(bucket));
  v.push_back(seconds_since_motion);
  return v;
}

std::vector<std::string> AnomalyFeatureVector::names(const std::vector<std::string>& rooms) {
  std::vector<std::string> n;
  for (const auto& r : rooms) {
    n.push_back(r + ".pressure_dwell");
    n.push_back(r + ".contact_opens");
    n.push_back(r + ".pir_activity");
  }
  n.emplace_back("time_bucket");
  n.emplace_back("seconds_since_motion");
  return n;
}

AnomalyFeatureVector extract_features(const std::vector<sensors::SensorEvent>& events, double clock,
                                      const world::HomeMap& map, const FeatureConfig& cfg) {
  if (!(cfg.window > 0.0)) throw InvalidArgument("extract_features: window must be positive");
  AnomalyFeatureVector f;
  std::map<std::string, std::size_t> slot;
  for (const auto& room : map.rooms()) {
    slot[room.name] = f.rooms.size();
    f.rooms.push_back({room.name});
  }
  f.bucket = time_bucket(cfg.day_start_offset + clock);
  const double ticks = cfg.window / cfg.sample_period;
  double last_motion = -1.0;
  bool any_motion = false;
  bool any_event = false;
  for (const auto& e : events) {
    if (e.timestamp <= clock - cfg.window || e.timestamp > clock) continue;
    any_event = true;
    const auto* placement = map.find_sensor(e.sensor_id);
    if (!placement) continue;
    const auto it = slot.find(placement->room);
    if (it == slot.end()) continue;
    RoomActivity& r = f.rooms[it->second];
    switch (e.kind) {
      case world::SensorKind::Pressure:
        if (e.value) r.pressure_dwell += cfg.sample_period;
        break;
      case world::SensorKind::Contact:
        if (e.value) r.contact_open_count += 1.0;
        break;
      case world::SensorKind::PIR:
        if (e.value) {
          r.pir_activity += 1.0 / ticks;
          if (!any_motion || e.timestamp > last_motion) last_motion = e.timestamp;
          any_motion = true;
        }
        break;
    }
  }
  for (auto& r : f.rooms) {
    r.pressure_dwell = std::min(r.pressure_dwell, cfg.window);
    r.pir_activity = std::min(r.pir_activity, 1.0);
  }
  if (any_motion)
    f.seconds_since_motion = std::max(0.0, clock - last_motion);
  else if (any_event)
    f.seconds_since_motion = cfg.window;
  return f;
}

bool DecisionTree::predict(std::span<const double> x) const {
  int i = 0;
  while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
    const auto& n = nodes[static_cast<std::size_t>(i)];
    i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(i)].anomalous;
}

std::vector<int> DecisionTree::path(std::span<const double> x) const {
  std::vector<int> p;
  int i = 0;
  p.push_back(i);
  while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
    const auto& n = nodes[static_cast<std::size_t>(i)];
    i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    p.push_back(i);
  }
  return p;
}

double Forest::score(std::span<const double> x) const {
  if (trees.empty()) return 0.0;
  std::size_t votes = 0;
  for (const auto& t : trees) votes += t.predict(x) ? 1 : 0;
  return static_cast<double>(votes) / static_cast<double>(trees.size());
}

namespace {

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<std::vector<double>>& rows, const std::vector<bool>& labels, const ForestParams& p,
              int features_per_split, Rng& rng)
      : rows_(rows), labels_(labels), p_(p), k_(features_per_split), rng_(rng) {}

  DecisionTree build(std::vector<std::size_t> sample) {
    tree_.nodes.clear();
    grow(std::move(sample), 0);
    return std::move(tree_);
  }

 private:
  static double gini(double pos, double n) {
    if (n <= 0) return 0.0;
    const double q = pos / n;
    return 2.0 * q * (1.0 - q);
  }

  int make_leaf(double pos, double n) {
    TreeNode leaf;
    leaf.anomalous = 2.0 * pos >= n;  // ties vote anomalous
    tree_.nodes.push_back(leaf);
    return static_cast<int>(tree_.nodes.size()) - 1;
  }

  int grow(std::vector<std::size_t> idx, int depth) {
    double pos = 0.0;
    for (auto i : idx) pos += labels_[i] ? 1.0 : 0.0;
    const double n = static_cast<double>(idx.size());
    if (depth >= p_.max_depth || pos == 0.0 || pos == n || static_cast<int>(idx.size()) < p_.min_samples_split)
      return make_leaf(pos, n);

    const int nf = static_cast<int>(rows_.front().size());
    std::vector<int> features(static_cast<std::size_t>(nf));
    std::iota(features.begin(), features.end(), 0);
    for (int j = 0; j < k_; ++j) {
      const int pick = rng_.uniform_int(j, nf - 1);
      std::swap(features[static_cast<std::size_t>(j)], features[static_cast<std::size_t>(pick)]);
    }

    const double parent = gini(pos, n);
    double best_gain = 1e-12;
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::pair<double, bool>> column(idx.size());
    for (int j = 0; j < k_; ++j) {
      const int f = features[static_cast<std::size_t>(j)];
      for (std::size_t r = 0; r < idx.size(); ++r) column[r] = {rows_[idx[r]][static_cast<std::size_t>(f)], labels_[idx[r]]};
      std::sort(column.begin(), column.end(),
                [](const auto& a, const auto& b) { return a.first < b.first || (a.first == b.first && a.second < b.second); });
      double left_pos = 0.0;
      for (std::size_t r = 0; r + 1 < column.size(); ++r) {
        left_pos += column[r].second ? 1.0 : 0.0;
        if (column[r].first == column[r + 1].first) continue;
        const double nl = static_cast<double>(r + 1);
        const double nr = n - nl;
        const double child = (nl * gini(left_pos, nl) + nr * gini(pos - left_pos, nr)) / n;
        const double gain = parent - child;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = f;
          best_threshold = 0.5 * (column[r].first + column[r + 1].first);
        }
      }
    }
    if (best_feature < 0) return make_leaf(pos, n);

    std::vector<std::size_t> left, right;
    for (auto i : idx) (rows_[i][static_cast<std::size_t>(best_feature)] <= best_threshold ? left : right).push_back(i);
    const int self = static_cast<int>(tree_.nodes.size());
    tree_.nodes.push_back({best_feature, best_threshold, -1, -1, false});
    const int l = grow(std::move(left), depth + 1);
    const int r = grow(std::move(right), depth + 1);
    tree_.nodes[static_cast<std::size_t>(self)].left = l;
    tree_.nodes[static_cast<std::size_t>(self)].right = r;
    return self;
  }

  const std::vector<std::vector<double>>& rows_;
  const std::vector<bool>& labels_;
  const ForestParams& p_;
  int k_;
  Rng& rng_;
  DecisionTree tree_;
};

}  // namespace

Forest train_forest(const std::vector<std::vector<double>>& rows, const std::vector<bool>& labels,
                    std::vector<std::string> feature_names, const ForestParams& params) {
  if (params.n_trees < 1) throw InvalidArgument("train_forest: n_trees must be at least 1");
  if (rows.empty() || rows.size() != labels.size()) throw InvalidArgument("train_forest: rows and labels must match");
  const std::size_t nf = rows.front().size();
  for (const auto& r : rows)
    if (r.size() != nf) throw InvalidArgument("train_forest: ragged feature rows");
  const auto positives = std::count(labels.begin(), labels.end(), true);
  if (positives == 0 || positives == static_cast<std::ptrdiff_t>(labels.size()))
    throw InvalidArgument("train_forest: training set holds a single class");

  int k = params.features_per_split > 0 ? params.features_per_split
                                        : static_cast<int>(std::lround(std::sqrt(static_cast<double>(nf))));
  k = std::clamp(k, 1, static_cast<int>(nf));

  Forest forest;
  forest.feature_names = std::move(feature_names);
  Rng rng(params.seed);
  TreeBuilder builder(rows, labels, params, k, rng);
  const int n = static_cast<int>(rows.size());
  for (int t = 0; t < params.n_trees; ++t) {
    std::vector<std::size_t> sample(rows.size());
    for (auto& s : sample) s = static_cast<std::size_t>(rng.uniform_int(0, n - 1));
    forest.trees.push_back(builder.build(std::move(sample)));
  }
  return forest;
}

Forest train_forest(const std::vector<LabeledSample>& labeled, const ForestParams& params) {
  if (labeled.empty()) throw InvalidArgument("train_forest: empty training set");
  std::vector<std::vector<double>> rows;
  std::vector<bool> labels;
  for (const auto& s : labeled) {
    rows.push_back(s.features.values());
    labels.push_back(s.anomalous);
  }
  std::vector<std::string> rooms;
  for (const auto& r : labeled.front().features.rooms) rooms.push_back(r.room);
  return train_forest(rows, labels, AnomalyFeatureVector::names(rooms), params);
}

AnomalyVerdict classify_anomaly(const Forest& forest, const AnomalyFeatureVector& f) {
  const auto x = f.values();
  AnomalyVerdict v;
  v.score = forest.score(x);
  v.anomalous = v.score >= 0.5;

  std::vector<double> evidence(f.rooms.size(), 0.0);
  const std::size_t room_features = f.rooms.size() * 3;
  for (const auto& tree : forest.trees) {
    if (!tree.predict(x)) continue;
    for (int node : tree.path(x)) {
      const auto& n = tree.nodes[static_cast<std::size_t>(node)];
      if (n.feature < 0) continue;
      const auto feat = static_cast<std::size_t>(n.feature);
      if (feat < room_features && x[feat] > n.threshold) evidence[feat / 3] += 1.0;
    }
  }
  std::size_t best = 0;
  double best_ev = 0.0;
  for (std::size_t i = 0; i < evidence.size(); ++i)
    if (evidence[i] > best_ev) {
      best_ev = evidence[i];
      best = i;
    }
  if (best_ev == 0.0) {
    auto key = [&](std::size_t i) { return std::pair{f.rooms[i].pressure_dwell, f.rooms[i].pir_activity}; };
    for (std::size_t i = 1; i < f.rooms.size(); ++i)
      if (key(i) > key(best)) best = i;
  }
  if (!f.rooms.empty()) v.room = f.rooms[best].room;
  return v;
}

bool dwell_rule_baseline(const AnomalyFeatureVector& f, double dwell_limit) {
  return std::any_of(f.rooms.begin(), f.rooms.end(), [&](const RoomActivity& r) { return r.pressure_dwell > dwell_limit; });
}

json to_json(const Forest& forest) {
  json trees = json::array();
  for (const auto& t : forest.trees) {
    json nodes = json::array();
    for (const auto& n : t.nodes) {
      if (n.feature < 0)
        nodes.push_back({{"leaf", n.anomalous}});
      else
        nodes.push_back({{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left}, {"right", n.right}});
    }
    trees.push_back({{"nodes", nodes}});
  }
  return {{"format", "homebot-forest"},
          {"version", Forest::kFormatVersion},
          {"feature_names", forest.feature_names},
          {"trees", trees}};
}

Forest forest_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != "homebot-forest") throw ParseError("forest: unexpected format tag");
    const int version = j.at("version").get<int>();
    if (version != Forest::kFormatVersion) throw ParseError("forest: unsupported version " + std::to_string(version));
    Forest f;
    f.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    const int nf = static_cast<int>(f.feature_names.size());
    for (const auto& tj : j.at("trees")) {
      DecisionTree t;
      for (const auto& nj : tj.at("nodes")) {
        TreeNode n;
        if (nj.contains("leaf")) {
          n.anomalous = nj.at("leaf").get<bool>();
        } else {
          n.feature = nj.at("feature").get<int>();
          n.threshold = nj.at("threshold").get<double>();
          n.left = nj.at("left").get<int>();
          n.right = nj.at("right").get<int>();
        }
        t.nodes.push_back(n);
      }
      const int count = static_cast<int>(t.nodes.size());
      if (count == 0) throw ParseError("forest: empty tree");
      for (const auto& n : t.nodes)
        if (n.feature >= nf || (n.feature >= 0 && (n.left <= 0 || n.right <= 0 || n.left >= count || n.right >= count)))
          throw ParseError("forest: node references out of range");
      f.trees.push_back(std::move(t));
    }
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("forest: ") + e.what());
  }
}

void save_forest(const Forest& forest, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write forest model to '" + path + "'");
  out << to_json(forest).dump(1) << '\n';
}

Forest load_forest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open forest model '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return forest_from_json(json::parse(buf.str()));
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("forest: ") + e.what());
  }
}

}  // namespace homebot::detection
