#include "steiner/engine.hpp"
#include "steiner/instance.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace steiner {
namespace {

constexpr double kAppendixLength = 4.178703819479203;

// Short sides paired is optimal; the long-side pairing collapses onto the crossing one.
const std::vector<Point> kThinRectangle{{-1, 0.2}, {1, -0.2}, {1, 0.2}, {-1, -0.2}};

double relative_gap(double a, double b) { return std::abs(a - b) / std::max(a, b); }

TEST(Solve, ThreePointsIsTheFermatStar) {
  const std::vector<Point> tri{{0, 0}, {2, 0}, {1, 1}};
  const Point f = fermat_point(tri[0], tri[1], tri[2]);
  const double star = distance(f, tri[0]) + distance(f, tri[1]) + distance(f, tri[2]);
  for (bool enhanced : {false, true}) {
    auto r = enhanced ? solve_enhanced(tri) : solve_original(tri);
    EXPECT_NEAR(r.solution.length, star, 1e-12);
    EXPECT_EQ(r.stats.topologies_built, 1);
    EXPECT_TRUE(r.solution.vector.empty());
    ASSERT_EQ(r.solution.steiner_positions.size(), 1u);
  }
}

TEST(Solve, RejectsBadInput) {
  EXPECT_THROW(solve_original(std::vector<Point>{{0, 0}, {1, 1}}), Error);
  EXPECT_THROW(solve_enhanced(std::vector<Point>{{0, 0}, {1, 1}, {1, 2, 3}}), Error);
  try {
    solve_original(std::vector<Point>{{1, 1}, {1, 1}, {1, 1}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AllCoincident);
  }
}

TEST(Solve, AppendixInstanceInBothOrders) {
  for (const char* name : {"appendix-a", "appendix-a-swapped"}) {
    const auto inst = builtin_instance(name);
    for (bool enhanced : {false, true}) {
      auto r = enhanced ? solve_enhanced(inst.points) : solve_original(inst.points);
      EXPECT_NEAR(r.solution.length, kAppendixLength, 1e-5) << name;
      EXPECT_NEAR(r.solution.length, tree_length(*r.solution.tree), 1e-12);
    }
  }
}

TEST(Solve, FiveCellMatchesTopologyThreeOne) {
  const auto inst = builtin_instance("paper-02");
  auto reference = build_tree(inst.points, TopologyVector{3, 1});
  OptimizeOptions o;
  o.collision_detection = false;
  const double expected = optimize(reference, o).length;
  auto a = solve_original(inst.points);
  auto b = solve_enhanced(inst.points);
  EXPECT_NEAR(a.solution.length, expected, 1e-9);
  EXPECT_NEAR(b.solution.length, expected, 1e-9);
  EXPECT_EQ(b.stats.reorganizations_taken, 0);
}

TEST(Solve, StepsToFirstLeaf) {
  for (int n = 4; n <= 8; ++n) {
    const auto inst = random_instance(n, 2, 100 + n);
    EXPECT_EQ(solve_original(inst.points).stats.steps_to_first_leaf, (n - 3) * (n - 3)) << n;
  }
}

TEST(Solve, SolutionReportsDegeneratePairs) {
  const auto sol = solve_original(kThinRectangle).solution;
  EXPECT_TRUE(sol.degenerate_pairs.empty());
  const std::vector<Point> wide{{0, 0}, {4, 0}, {2, 0.2}};
  const auto star = solve_original(wide).solution;
  ASSERT_EQ(star.degenerate_pairs.size(), 1u);
  EXPECT_EQ(star.degenerate_pairs[0], (std::array<int, 2>{2, 3}));
}

TEST(Enumerate, CountsFullTopologies) {
  SearchOptions opts;
  const std::uint64_t expected[] = {3, 15, 105, 945};
  for (int n = 4; n <= 7; ++n) {
    const auto inst = random_instance(n, 2, 7);
    EXPECT_EQ(enumerate_all(inst.points, opts, true).leaves, expected[n - 4]);
  }
  const auto inst = random_instance(6, 3, 9);
  auto r = enumerate_all(inst.points, opts);
  EXPECT_EQ(r.leaves, 105u);
  EXPECT_EQ(r.stats.optimizations, 105);
}

TEST(Enumerate, MatchesBranchAndBound) {
  const std::vector<Point> square{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
  EXPECT_NEAR(enumerate_all(square).solution.length, solve_original(square).solution.length, 1e-12);
  for (int seed = 0; seed < 5; ++seed) {
    const auto inst = random_instance(6, 2 + seed % 2, 300 + seed);
    EXPECT_NEAR(enumerate_all(inst.points).solution.length, solve_enhanced(inst.points).solution.length, 1e-9);
  }
}

TEST(Enumerate, CapIsEnforced) {
  const auto inst = random_instance(9, 2, 1);
  try {
    enumerate_all(inst.points);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CapExceeded);
  }
  SearchOptions opts;
  opts.enumerate_cap = 9;
  EXPECT_NO_THROW(enumerate_all(inst.points, opts, true));
}

TEST(TwinPrune, TargetIsTheCrossingReorganization) {
  OptimizeOptions o;
  o.collision_detection = false;
  auto collapsed = build_tree(kThinRectangle, TopologyVector{2});
  optimize(collapsed, o);
  auto target = twin_prune_target(collapsed, 1e-4);
  ASSERT_TRUE(target.has_value());
  EXPECT_EQ(*target, TopologyVector{3});

  auto crossing = build_tree(kThinRectangle, TopologyVector{3});
  optimize(crossing, o);
  EXPECT_FALSE(twin_prune_target(crossing, 1e-4).has_value());

  auto full = build_tree(kThinRectangle, TopologyVector{1});
  optimize(full, o);
  EXPECT_FALSE(twin_prune_target(full, 1e-4).has_value());

  std::vector<Point> lifted;
  for (const auto& p : kThinRectangle) lifted.push_back({p[0], p[1], 0.0});
  auto lifted_tree = build_tree(lifted, TopologyVector{2});
  optimize(lifted_tree, o);
  EXPECT_FALSE(twin_prune_target(lifted_tree, 1e-4).has_value());
}

TEST(TwinPrune, CutsWithoutOptimizing) {
  SearchOptions opts;
  opts.lower_bound = false;
  auto plain = solve_original(kThinRectangle, opts);
  opts.twin_prune = true;
  auto pruned = solve_original(kThinRectangle, opts);
  EXPECT_NEAR(pruned.solution.length, plain.solution.length, 1e-12);
  EXPECT_EQ(pruned.stats.twin_cuts, 1);
  EXPECT_EQ(pruned.stats.optimizations, plain.stats.optimizations - 1);
}

TEST(TwinTrees, CrossingPairingCollapsesToTheDiagonals) {
  const std::vector<Point> cross{{-1, 1}, {1, 1}, {-1, -1}, {1, -1}};
  OptimizeOptions o;
  o.collision_detection = false;
  auto crossing = build_tree(cross, TopologyVector{1});
  const double length = optimize(crossing, o).length;
  EXPECT_NEAR(length, 4.0 * std::sqrt(2.0), 1e-6);
  EXPECT_LE(distance(crossing.steiner_position(0), crossing.steiner_position(1)), 1e-4 * crossing.scale());
  for (const auto& r : reorganize(crossing, 1, 0)) {
    auto t = r.tree;
    EXPECT_LE(optimize(t, o).length, length + 1e-9);
  }
}

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

TEST(SchemeProperty, BothSchemesAgree) {
  std::mt19937_64 rng(2024);
  for (int instance = 0; instance < 100; ++instance) {
    const int n = 5 + instance % 4;
    const auto pts = random_points(rng, n, 2 + (instance / 4) % 2);
    const auto a = solve_original(pts);
    const auto b = solve_enhanced(pts);
    ASSERT_LT(relative_gap(a.solution.length, b.solution.length), 1e-6) << "instance " << instance;
  }
}

TEST(SchemeProperty, InputOrderInvariance) {
  std::mt19937_64 rng(77);
  for (int instance = 0; instance < 20; ++instance) {
    auto pts = random_points(rng, 6 + instance % 2, 2 + instance % 2);
    const double base = solve_enhanced(pts).solution.length;
    std::shuffle(pts.begin(), pts.end(), rng);
    EXPECT_LT(relative_gap(base, solve_enhanced(pts).solution.length), 1e-9) << "instance " << instance;
    EXPECT_LT(relative_gap(base, solve_original(pts).solution.length), 1e-9) << "instance " << instance;
  }
}

TEST(SchemeProperty, ChildrenAreNoShorterThanTheirParent) {
  std::mt19937_64 rng(5);
  OptimizeOptions o;
  o.collision_detection = false;
  for (int instance = 0; instance < 20; ++instance) {
    const auto pts = random_points(rng, 7, 2 + instance % 2);
    auto tree = root_tree(pts);
    double parent = optimize(tree, o).length;
    while (!tree.complete()) {
      double best = 0.0;
      std::optional<TopologyTree> next;
      for (int t = 1; t <= tree.edge_count(); ++t) {
        auto child = merge_edge(tree, t);
        const double len = optimize(child, o).length;
        EXPECT_GE(len, parent - 1e-9);
        if (!next || len < best) best = len, next = child;
      }
      tree = *next;
      parent = best;
    }
  }
}

TEST(SchemeProperty, EnhancedExploresNoMoreThanEnumeration) {
  std::mt19937_64 rng(11);
  for (int instance = 0; instance < 10; ++instance) {
    const int n = 5 + instance % 3;
    const auto pts = random_points(rng, n, 2);
    const auto r = solve_enhanced(pts);
    std::int64_t nodes = 0, level = 1;
    for (int k = 0; k <= n - 3; ++k) {
      nodes += level;
      level *= 2 * k + 3;
    }
    EXPECT_LE(r.stats.topologies_built + r.stats.reorganizations_taken, nodes);
    EXPECT_LE(r.stats.optimizations, nodes);
  }
}

TEST(ErrorFigureDiagnostic, FlagChangesThePruning) {
  const auto inst = builtin_instance("appendix-a");
  SearchOptions opts;
  opts.lower_bound = false;
  const auto plain = solve_original(inst.points, opts);
  opts.error_figure_pruning = true;
  const auto faulty = solve_original(inst.points, opts);
  EXPECT_LT(faulty.stats.optimizations, plain.stats.optimizations);
}

}  // namespace
}  // namespace steiner
