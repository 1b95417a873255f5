#include "steiner/optimizer.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace steiner {
namespace {

constexpr double kSqrt3 = 1.7320508075688772;

void place(TopologyTree& tree, int ordinal, const Point& p) {
  auto dst = tree.steiner_position(ordinal);
  std::copy(p.coords().begin(), p.coords().end(), dst.begin());
}

Point steiner_at(const TopologyTree& tree, int ordinal) { return Point(tree.steiner_position(ordinal)); }

std::vector<Point> random_points(std::mt19937_64& rng, int n, int dim) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i) {
    Point p(static_cast<std::size_t>(dim));
    for (int k = 0; k < dim; ++k) p[k] = u(rng);
    pts.push_back(p);
  }
  return pts;
}

TopologyVector random_topology(std::mt19937_64& rng, int n) {
  TopologyVector v;
  for (int i = 0; i < n - 3; ++i) v.push_back(1 + static_cast<int>(rng() % static_cast<unsigned>(2 * i + 3)));
  return v;
}

// Independent oracle: cyclic ternary search over every Steiner coordinate.
double coordinate_descent_length(TopologyTree tree) {
  auto pos = tree.steiner_positions();
  for (int round = 0; round < 400; ++round) {
    for (std::size_t c = 0; c < pos.size(); ++c) {
      double lo = pos[c] - 2.0, hi = pos[c] + 2.0;
      for (int it = 0; it < 100; ++it) {
        const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        pos[c] = m1;
        const double f1 = tree_length(tree);
        pos[c] = m2;
        const double f2 = tree_length(tree);
        if (f1 < f2) hi = m2; else lo = m1;
      }
      pos[c] = 0.5 * (lo + hi);
    }
  }
  return tree_length(tree);
}

const std::vector<Point> kUnitTriangle{{0, 0}, {1, 0}, {0.5, kSqrt3 / 2.0}};

TEST(TreeLength, UnitTriangleAtCentroid) {
  auto tree = root_tree(kUnitTriangle);
  place(tree, 0, Point{0.5, kSqrt3 / 6.0});
  EXPECT_NEAR(tree_length(tree), kSqrt3, 1e-10);
}

TEST(TreeLength, CoincidentEndpointsContributeZero) {
  auto tree = root_tree(kUnitTriangle);
  place(tree, 0, Point{0, 0});
  EXPECT_NEAR(tree_length(tree), 1.0 + 1.0, 1e-15);
}

TEST(Optimize, SquareMatchesBruteForce) {
  const std::vector<Point> square{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
  auto tree = build_tree(square, TopologyVector{1});
  const double oracle = coordinate_descent_length(tree);
  EXPECT_NEAR(oracle, 2.0 * (1.0 + kSqrt3), 1e-6);
  const auto out = optimize(tree, OptimizeOptions{});
  EXPECT_EQ(out.kind, OptimizeStatus::Converged);
  EXPECT_NEAR(out.length, 5.4641016151, 1e-6);
  EXPECT_NEAR(out.length, oracle, 1e-6);
}

TEST(Optimize, ThreePointsReachSimpsonLength) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto pts = random_points(rng, 3, 2 + trial % 2);
    auto tree = root_tree(pts);
    place(tree, 0, pts[trial % 3]);
    const auto out = optimize(tree, OptimizeOptions{});
    EXPECT_EQ(out.kind, OptimizeStatus::Converged);
    const bool wide = wide_angle(pts[0], pts[1], pts[2]) || wide_angle(pts[1], pts[0], pts[2]) ||
                      wide_angle(pts[2], pts[0], pts[1]);
    if (wide) continue;
    const double expected = distance(equilateral_point(pts[0], pts[1], pts[2]).e, pts[2]);
    EXPECT_NEAR(out.length, expected, 1e-9 * expected);
  }
}

TEST(IterateOnce, FixedPointStays) {
  auto tree = root_tree(kUnitTriangle);
  place(tree, 0, fermat_point(kUnitTriangle[0], kUnitTriangle[1], kUnitTriangle[2]));
  const Point before = steiner_at(tree, 0);
  iterate_once(tree);
  EXPECT_EQ(steiner_at(tree, 0), before);
}

TEST(IterateOnce, VertexStartJumpsToFermatPoint) {
  auto tree = root_tree(kUnitTriangle);
  place(tree, 0, kUnitTriangle[1]);
  iterate_once(tree);
  const Point s = steiner_at(tree, 0);
  EXPECT_NEAR(s[0], 0.5, 1e-12);
  EXPECT_NEAR(s[1], kSqrt3 / 6.0, 1e-12);
}

TEST(IterateOnce, UpdatesUsePreSweepPositions) {
  const std::vector<Point> pts{{0, 0}, {4, 0}, {2, 3}, {0, 3}};
  auto tree = build_tree(pts, TopologyVector{1});
  place(tree, 0, Point{2, 1});
  place(tree, 1, Point{1, 2});
  // Expected values from the old positions of the other Steiner point.
  auto expect_for = [&](int ordinal) {
    const auto& nb = tree.neighbors(tree.steiner_global(ordinal));
    return fermat_point(Point(tree.position(nb[0])), Point(tree.position(nb[1])), Point(tree.position(nb[2])));
  };
  const Point e0 = expect_for(0), e1 = expect_for(1);
  iterate_once(tree);
  EXPECT_EQ(steiner_at(tree, 0), e0);
  EXPECT_EQ(steiner_at(tree, 1), e1);
}

TEST(ErrorFigure, Examples) {
  auto tree = root_tree(kUnitTriangle);
  place(tree, 0, Point{0.5, kSqrt3 / 6.0});
  EXPECT_NEAR(error_figure(tree), 0.0, 1e-7);

  const std::vector<Point> skew{{1, 0}, {1, 0}, {-1, 0}};
  auto crafted = root_tree(skew);
  place(crafted, 0, Point{0, 0});
  EXPECT_NEAR(error_figure(crafted), kSqrt3, 1e-12);

  // Every angle at least 120 degrees (zero-length rays included): all pos arguments clamp to zero.
  const std::vector<Point> wide{{0, 0}, {1, 0}, {-1, 0}};
  auto open = root_tree(wide);
  place(open, 0, Point{0, 0});
  EXPECT_EQ(error_figure(open), 0.0);
}

TEST(DetectCollision, Examples) {
  const std::vector<Point> pts{{0, 0}, {4, 0}, {4, 3}, {0, 3}, {2, 5}};
  auto tree = build_tree(pts, TopologyVector{1, 2});
  for (int k = 0; k < 3; ++k) place(tree, k, Point{1.0 + k, 1.0});
  EXPECT_FALSE(detect_collision(tree, 1e-3).has_value());

  // Find an adjacent and a non-adjacent Steiner pair.
  std::optional<SteinerPair> adjacent, apart;
  for (int i = 1; i < 3; ++i)
    for (int h = 0; h < i; ++h) {
      if (tree.adjacent(tree.steiner_global(i), tree.steiner_global(h))) {
        if (!adjacent) adjacent = SteinerPair{i, h};
      } else if (!apart) {
        apart = SteinerPair{i, h};
      }
    }
  ASSERT_TRUE(adjacent && apart);

  auto touching = tree;
  place(touching, adjacent->i, steiner_at(touching, adjacent->h));
  EXPECT_EQ(detect_collision(touching, 1e-3), adjacent);
  const SteinerPair suppressed[] = {*adjacent};
  EXPECT_FALSE(detect_collision(touching, 1e-3, suppressed).has_value());

  auto separated = tree;
  place(separated, apart->i, steiner_at(separated, apart->h));
  EXPECT_FALSE(detect_collision(separated, 1e-3).has_value());
}

TEST(DetectCollision, SmallestIThenSmallestH) {
  const std::vector<Point> pts{{0, 0}, {4, 0}, {4, 3}, {0, 3}, {2, 5}};
  auto tree = build_tree(pts, TopologyVector{1, 2});
  for (int k = 0; k < 3; ++k) place(tree, k, Point{1, 1});
  std::optional<SteinerPair> expected;
  for (int i = 1; i < 3 && !expected; ++i)
    for (int h = 0; h < i && !expected; ++h)
      if (tree.adjacent(tree.steiner_global(i), tree.steiner_global(h))) expected = SteinerPair{i, h};
  EXPECT_EQ(detect_collision(tree, 1e-6), expected);
}

// A, C, D, B so that topology (1) pairs {A, B} on S_1 and {C, D} on S_0.
const std::vector<Point> kCross{{-1, 1}, {1, 1}, {-1, -1}, {1, -1}};

TEST(Optimize, CrossingPairsCollide) {
  auto tree = build_tree(kCross, TopologyVector{1});
  const auto out = optimize(tree, OptimizeOptions{});
  EXPECT_EQ(out.kind, OptimizeStatus::CollisionDetected);
  ASSERT_TRUE(out.collided_pair.has_value());
  EXPECT_EQ(*out.collided_pair, (SteinerPair{1, 0}));
  EXPECT_NEAR(out.length, tree_length(tree), 1e-15);
}

TEST(Optimize, CrossingPairsMergeWithoutDetection) {
  auto tree = build_tree(kCross, TopologyVector{1});
  OptimizeOptions opts;
  opts.collision_detection = false;
  const auto out = optimize(tree, opts);
  EXPECT_EQ(out.kind, OptimizeStatus::Converged);
  EXPECT_FALSE(out.collided_pair.has_value());
  EXPECT_NEAR(out.length, 4.0 * std::sqrt(2.0), 1e-9);
  EXPECT_LT(distance(tree.steiner_position(0), tree.steiner_position(1)), 1e-6);
}

TEST(Optimize, IterationLimitKeepsCurrentLength) {
  const std::vector<Point> pts{{0, 0}, {4, 0}, {4, 3}, {0, 3}, {2, 5}};
  auto tree = build_tree(pts, TopologyVector{1, 2});
  OptimizeOptions opts;
  opts.max_iters = 1;
  opts.collision_detection = false;
  const auto out = optimize(tree, opts);
  EXPECT_EQ(out.kind, OptimizeStatus::IterationLimit);
  EXPECT_EQ(out.iterations, 1);
  EXPECT_DOUBLE_EQ(out.length, tree_length(tree));
}

TEST(OptimizeOptions, Validation) {
  OptimizeOptions opts;
  EXPECT_NO_THROW(opts.validate());
  opts.conv_eps = 0.0;
  EXPECT_THROW(opts.validate(), Error);
  opts = {};
  opts.collision_eps = -1.0;
  EXPECT_THROW(opts.validate(), Error);
  opts = {};
  opts.max_iters = 0;
  EXPECT_THROW(opts.validate(), Error);
}

struct RandomCase {
  std::vector<Point> points;
  TopologyVector topology;
};

std::vector<RandomCase> random_cases(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<RandomCase> out;
  for (int trial = 0; trial < count; ++trial) {
    const int n = 4 + trial % 5;
    const int dim = 2 + (trial / 5) % 2;
    RandomCase c;
    c.points = random_points(rng, n, dim);
    c.topology = random_topology(rng, n);
    out.push_back(std::move(c));
  }
  return out;
}

TEST(OptimizeProperty, LengthNeverIncreases) {
  OptimizeOptions opts;
  opts.collision_detection = false;
  for (const auto& c : random_cases(500, 17)) {
    auto tree = build_tree(c.points, c.topology);
    std::vector<double> trace;
    optimize(tree, opts, {}, &trace);
    for (std::size_t k = 1; k < trace.size(); ++k)
      ASSERT_LE(trace[k], trace[k - 1] + 1e-12) << c.topology.to_string() << " step " << k;
  }
}

TEST(OptimizeProperty, ConvergedTreesMeetAngleConditions) {
  OptimizeOptions opts;
  opts.collision_detection = false;
  int interior = 0;
  for (const auto& c : random_cases(500, 23)) {
    auto tree = build_tree(c.points, c.topology);
    const auto out = optimize(tree, opts);
    if (out.kind != OptimizeStatus::Converged) continue;
    const double short_edge = 1e-6 * tree.scale();
    for (int k = 0; k < tree.steiner_count(); ++k) {
      const auto x = tree.steiner_position(k);
      const auto& nb = tree.neighbors(tree.steiner_global(k));
      bool degenerate = false;
      for (int w : nb) degenerate = degenerate || distance(x, tree.position(w)) <= short_edge;
      if (degenerate) continue;
      ++interior;
      std::vector<double> force(x.size(), 0.0);
      for (int a = 0; a < 3; ++a) {
        const auto p = tree.position(nb[a]);
        const double len = distance(x, p);
        for (std::size_t d = 0; d < x.size(); ++d) force[d] += (p[d] - x[d]) / len;
        for (int b = a + 1; b < 3; ++b)
          EXPECT_GE(angle_degrees(x, p, tree.position(nb[b])), 119.9) << c.topology.to_string();
      }
      EXPECT_LT(norm(force), 1e-4) << c.topology.to_string();
    }
  }
  EXPECT_GT(interior, 500);
}

TEST(OptimizeProperty, DetectionDoesNotPerturbIterates) {
  OptimizeOptions on, off;
  off.collision_detection = false;
  int compared = 0;
  for (const auto& c : random_cases(300, 29)) {
    auto a = build_tree(c.points, c.topology);
    auto b = a;
    std::vector<double> ta, tb;
    const auto oa = optimize(a, on, {}, &ta);
    if (oa.kind == OptimizeStatus::CollisionDetected) continue;
    const auto ob = optimize(b, off, {}, &tb);
    ++compared;
    EXPECT_EQ(ta, tb);
    EXPECT_EQ(oa.iterations, ob.iterations);
    EXPECT_TRUE(std::equal(a.steiner_positions().begin(), a.steiner_positions().end(),
                           b.steiner_positions().begin()));
  }
  EXPECT_GT(compared, 20);
}

TEST(Optimize, SuppressedPairKeepsIterating) {
  auto tree = build_tree(kCross, TopologyVector{1});
  const SteinerPair suppressed[] = {{1, 0}};
  const auto out = optimize(tree, OptimizeOptions{}, suppressed);
  EXPECT_NE(out.kind, OptimizeStatus::CollisionDetected);
  EXPECT_NEAR(out.length, 4.0 * std::sqrt(2.0), 1e-9);
}

}  // namespace
}  // namespace steiner
