#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include <gtest/gtest.h>

#include "homebot/error.hpp"
#include "homebot/motion/glyphs.hpp"
#include "homebot/motion/trajectory.hpp"
#include "homebot/rng.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace homebot;
using namespace homebot::motion;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

using gen::central_difference;
using gen::random_trajectory;

}  // namespace

TEST(SeedStraight, EvenSpacing) {
  const auto t = seed_straight(vec({0, 0}), vec({1, 0}), 5);
  for (int i = 0; i < 5; ++i) {
    EXPECT_DOUBLE_EQ(t.waypoints(i, 0), 0.25 * i);
    EXPECT_DOUBLE_EQ(t.waypoints(i, 1), 0.0);
  }
}

TEST(SeedStraight, StartEqualsGoal) {
  const auto t = seed_straight(vec({0.3, 0.4}), vec({0.3, 0.4}), 6);
  for (Eigen::Index i = 0; i < t.size(); ++i) EXPECT_EQ(t.waypoints.row(i), t.waypoints.row(0));
}

TEST(SeedStraight, RejectsBadInput) {
  EXPECT_THROW(seed_straight(vec({0, 0}), vec({1, 0}), 2), InvalidArgument);
  EXPECT_THROW(seed_straight(vec({0, 0}), vec({1, 0, 0}), 5), InvalidArgument);
}

TEST(SeedStraight, MinimizesSmoothnessAgainstPerturbations) {
  Rng rng(4);
  const auto t = seed_straight(vec({0, 0}), vec({1, 2}), 11);
  const double base = smoothness_cost(t);
  for (int k = 0; k < 200; ++k) {
    auto p = t;
    for (Eigen::Index i = 1; i + 1 < p.size(); ++i) p.waypoints.row(i) += Eigen::RowVector2d(rng.normal(0, 0.05), rng.normal(0, 0.05));
    EXPECT_GT(smoothness_cost(p), base);
  }
}

TEST(Playful, ZeroAmplitudeIsTheSeed) {
  const auto t = seed_straight(vec({0, 0}), vec({1, 0}), 9);
  EXPECT_TRUE(playful_offsets(t, 0.0).points.isApprox(t.waypoints));
}

TEST(Playful, MidpointOffsetAndFixedEnds) {
  const auto t = seed_straight(vec({0, 0}), vec({1, 0}), 21);
  const auto c = playful_offsets(t, 0.2);
  EXPECT_FALSE(c.degenerate);
  EXPECT_NEAR(c.points(10, 1), 0.2, 1e-12);
  EXPECT_NEAR(c.points(10, 0), 0.5, 1e-12);
  EXPECT_EQ(c.points.row(0), t.waypoints.row(0));
  EXPECT_EQ(c.points.row(20), t.waypoints.row(20));
}

TEST(Playful, DegenerateWhenStartEqualsGoal) {
  const auto t = seed_straight(vec({1, 1}), vec({1, 1}), 7);
  const auto c = playful_offsets(t, 0.2);
  EXPECT_TRUE(c.degenerate);
  EXPECT_TRUE(c.points.isApprox(t.waypoints));
}

TEST(Playful, NormalInThreeDimensionsIsVertical) {
  const auto n = playful_normal(vec({1, 0, 0}));
  EXPECT_NEAR(n(2), 1.0, 1e-12);
  const auto v = playful_normal(vec({0, 0, 1}));
  EXPECT_NEAR(v(0), 1.0, 1e-12);
}

TEST(Objective, GradientMatchesFiniteDifferences) {
  Rng rng(31);
  for (int k = 0; k < 50; ++k) {
    const int dims = k % 2 == 0 ? 2 : 3;
    const auto t = random_trajectory(rng, rng.uniform_int(5, 30), dims);
    const double lambda = rng.uniform(0.0, 5.0);
    const auto targets = playful_offsets(t, rng.uniform(0.0, 0.3)).points;
    const auto g = objective_gradient(t, targets, lambda);
    const auto fd = central_difference(t, targets, lambda, 1e-5);
    const double scale = std::max(g.cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((g - fd).cwiseAbs().maxCoeff() / scale, 1e-5) << "trajectory " << k;
    EXPECT_TRUE(g.row(0).isZero());
    EXPECT_TRUE(g.row(g.rows() - 1).isZero());
  }
}

TEST(Optimize, ZeroWeightRecoversStraightLine) {
  Rng rng(12);
  auto t = random_trajectory(rng, 15, 2);
  PlayfulParams p;
  p.play_weight = 0.0;
  const auto r = optimize(t, p);
  const auto straight = seed_straight(t.waypoints.row(0).transpose(), t.waypoints.row(14).transpose(), 15);
  EXPECT_LE((r.trajectory.waypoints - straight.waypoints).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Optimize, MonotoneDescentAndQuadraticOracle) {
  const auto seed = seed_straight(vec({0, 0}), vec({1, 0}), 21);
  PlayfulParams p;
  p.amplitude = 0.2;
  p.play_weight = 1.0;
  const auto r = optimize(seed, p);
  const auto& h = r.report.objective_history;
  ASSERT_GE(h.size(), 2u);
  for (std::size_t i = 1; i < h.size(); ++i) EXPECT_LE(h[i], h[i - 1]);
  const auto targets = playful_offsets(seed, 0.2).points;
  const auto want = oracle::quadratic_optimum(targets, seed.waypoints.row(0), seed.waypoints.row(20), 1.0);
  EXPECT_LE((r.trajectory.waypoints - want).cwiseAbs().maxCoeff(), 1e-6);
  const double peak = r.trajectory.waypoints.col(1).cwiseAbs().maxCoeff();
  EXPECT_GT(peak, 0.0);
  EXPECT_LT(peak, 0.2);
}

TEST(Optimize, LargeWeightFollowsTargets) {
  const auto seed = seed_straight(vec({0, 0}), vec({1, 0}), 21);
  PlayfulParams p;
  p.play_weight = 1e6;
  const auto r = optimize(seed, p);
  const auto targets = playful_offsets(seed, p.amplitude).points;
  EXPECT_LE((r.trajectory.waypoints - targets).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(Optimize, BoundsClampWaypoints) {
  const auto seed = seed_straight(vec({0, 0}), vec({1, 0}), 21);
  PlayfulParams p;
  p.bounds = {vec({-1, -1}), vec({2, 0.1})};
  const auto r = optimize(seed, p);
  EXPECT_LE(r.trajectory.waypoints.col(1).maxCoeff(), 0.1 + 1e-12);
}

TEST(Guidelines, DefaultsPass) {
  const auto seed = seed_straight(vec({0, 0}), vec({1, 0}), 21);
  PlayfulParams p;
  p.bounds = {vec({-1, -1}), vec({2, 1})};
  const auto r = optimize(seed, p);
  const auto g = check_guidelines(r.trajectory, p, vec({1, 0}));
  EXPECT_TRUE(g.helpful);
  EXPECT_TRUE(g.safe);
  EXPECT_TRUE(g.clear);
}

TEST(Guidelines, OutOfBoundsIsUnsafe) {
  auto t = seed_straight(vec({0, 0}), vec({1, 0}), 11);
  t.waypoints(5, 1) = 5.0;
  PlayfulParams p;
  p.bounds = {vec({-1, -1}), vec({2, 1})};
  p.velocity_limit = 1e9;
  EXPECT_FALSE(check_guidelines(t, p, vec({1, 0})).safe);
}

TEST(Guidelines, DisplacedEndpointIsNotHelpful) {
  auto t = seed_straight(vec({0, 0}), vec({1, 0}), 11);
  t.waypoints(10, 0) = 1.1;
  EXPECT_FALSE(check_guidelines(t, {}, vec({1, 0})).helpful);
}

TEST(Trajectory, CsvHeaderAndRows) {
  const auto csv = trajectory_csv(seed_straight(vec({0, 0}), vec({1, 0}), 3));
  EXPECT_EQ(csv.rfind("t,x,y\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

namespace {

using Key = gen::SegmentKey;
using gen::segment_set;
const std::string& kAlphabet = gen::kGlyphAlphabet;

}  // namespace

TEST(Glyphs, AtMostSixSegmentsAndPairwiseDistinct) {
  std::vector<std::set<Key>> sets;
  for (char ch : kAlphabet) {
    ASSERT_TRUE(glyph_supported(ch));
    const auto g = glyph_strokes(ch, {Eigen::Vector2d(0, 0), Eigen::Vector2d(0.5, 0.5)});
    EXPECT_GE(g.segments.size(), 1u) << ch;
    EXPECT_LE(g.segments.size(), kMaxGlyphSegments) << ch;
    sets.push_back(segment_set(ch));
    EXPECT_EQ(sets.back().size(), g.segments.size()) << "repeated stroke in " << ch;
  }
  for (std::size_t i = 0; i < sets.size(); ++i)
    for (std::size_t j = i + 1; j < sets.size(); ++j) EXPECT_NE(sets[i], sets[j]) << kAlphabet[i] << " vs " << kAlphabet[j];
}

TEST(Glyphs, ZeroIsTheSixSegmentOutline) {
  const std::set<Key> outline{{-2, 2, 2, 2}, {2, 0, 2, 2}, {2, -2, 2, 0}, {-2, -2, 2, -2}, {-2, -2, -2, 0}, {-2, 0, -2, 2}};
  EXPECT_EQ(segment_set('0'), outline);
}

TEST(Glyphs, OneIsTwoCollinearVerticals) {
  const auto g = glyph_strokes('1', {Eigen::Vector2d(0, 0), Eigen::Vector2d(0.5, 0.5)});
  ASSERT_EQ(g.segments.size(), 2u);
  for (const auto& s : g.segments) {
    EXPECT_NEAR(s.a.x(), 0.5, 1e-12);
    EXPECT_NEAR(s.b.x(), 0.5, 1e-12);
  }
}

TEST(Glyphs, AnchorsMapCellToWorld) {
  // Anchors rotated by 90 degrees and doubled in scale.
  const auto g = glyph_strokes('7', {Eigen::Vector2d(1, 1), Eigen::Vector2d(0, 2)});
  for (std::size_t i = 0; i < g.segments.size(); ++i) {
    const Eigen::Vector2d local = g.segments[i].a;
    const Eigen::Vector2d want = Eigen::Vector2d(1, 1) + 2.0 * Eigen::Vector2d(-local.y(), local.x());
    EXPECT_NEAR((g.world_segments[i].a - want).norm(), 0.0, 1e-12);
  }
}

TEST(Glyphs, LowerCaseAndErrors) {
  EXPECT_EQ(segment_set('a'), segment_set('A'));
  EXPECT_FALSE(glyph_supported('#'));
  EXPECT_THROW(glyph_strokes('#', {Eigen::Vector2d(0, 0), Eigen::Vector2d(0.5, 0.5)}), InvalidArgument);
  EXPECT_THROW(glyph_strokes('A', {Eigen::Vector2d(0, 0), Eigen::Vector2d(0, 0)}), InvalidArgument);
  const auto csv = glyph_csv(glyph_strokes('L', {Eigen::Vector2d(0, 0), Eigen::Vector2d(0.5, 0.5)}));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}
