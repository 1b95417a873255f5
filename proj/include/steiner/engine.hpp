#ifndef STEINER_ENGINE_HPP
#define STEINER_ENGINE_HPP

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "steiner/bounds.hpp"
#include "steiner/error.hpp"
#include "steiner/geometry.hpp"
#include "steiner/optimizer.hpp"
#include "steiner/topology.hpp"

namespace steiner {

struct SearchOptions {
  OptimizeOptions optimize;
  bool lower_bound = true;
  bool twin_prune = false;            // 2D only
  bool error_figure_pruning = false;  // diagnostics: the unsound L - E < L* test
  int enumerate_cap = 8;

  void validate() const {
    optimize.validate();
    if (enumerate_cap < 3 || enumerate_cap > 64) throw Error(ErrorCode::InvalidArgument, "enumerate cap must be in [3, 64]");
  }
};

struct Solution {
  double length = std::numeric_limits<double>::infinity();
  TopologyVector vector;
  std::vector<Point> steiner_positions;
  std::vector<std::array<int, 2>> degenerate_pairs;  // global ids of edges shorter than the collision threshold
  std::optional<TopologyTree> tree;
};

struct SearchStats {
  std::int64_t topologies_built = 0;
  std::int64_t optimizations = 0;
  std::int64_t lower_bounds_computed = 0;
  std::int64_t reorganizations_taken = 0;
  std::int64_t nodes_cut = 0;
  std::int64_t steps_to_first_leaf = 0;
  std::int64_t jacobi_fallbacks = 0;
  std::int64_t twin_cuts = 0;
  double wall_time = 0.0;
};

struct SearchResult {
  Solution solution;
  SearchStats stats;
  std::uint64_t leaves = 0;  // enumerate_all only
};

enum class NodeState { Unvisited, Active, Optimized, Explored, Pruned, Cut };

struct BnbNode {
  double length = 0.0;
  NodeState state = NodeState::Unvisited;
  std::map<int, std::unique_ptr<BnbNode>> children;

  BnbNode& child(int x) {
    auto& slot = children[x];
    if (!slot) slot = std::make_unique<BnbNode>();
    return *slot;
  }
};

inline Solution make_solution(const TopologyTree& tree, double collision_eps) {
  Solution s;
  s.length = tree_length(tree);
  s.vector = tree.vector();
  for (int k = 0; k < tree.steiner_count(); ++k) s.steiner_positions.emplace_back(tree.steiner_position(k));
  const double eps = collision_eps * tree.scale();
  for (int e = 1; e <= tree.edge_count(); ++e) {
    auto ends = tree.edge(e);
    if (distance(tree.position(ends[0]), tree.position(ends[1])) <= eps)
      s.degenerate_pairs.push_back({std::min(ends[0], ends[1]), std::max(ends[0], ends[1])});
  }
  std::sort(s.degenerate_pairs.begin(), s.degenerate_pairs.end());
  s.tree = tree;
  return s;
}

namespace detail {

inline std::array<int, 2> other_two(const TopologyTree& tree, int v, int skip) {
  std::array<int, 2> out{TopologyTree::kNone, TopologyTree::kNone};
  int k = 0;
  for (int w : tree.neighbors(v))
    if (w != skip && w != TopologyTree::kNone && k < 2) out[k++] = w;
  return out;
}

inline bool pair_crosses(const TopologyTree& tree, int si, int sh) {
  auto ab = other_two(tree, si, sh);
  auto cd = other_two(tree, sh, si);
  return segments_intersect_2d(tree.position(ab[0]), tree.position(ab[1]), tree.position(cd[0]), tree.position(cd[1]));
}

}  // namespace detail

/// For an optimized 2D tree with a collided pair whose neighborhoods do not
/// cross, the reorganization that makes them cross. Its optimal length is at
/// least this tree's length.
inline std::optional<TopologyVector> twin_prune_target(const TopologyTree& tree, double collision_eps) {
  if (tree.dim() != 2) return std::nullopt;
  const double eps = collision_eps * tree.scale();
  for (int i = 1; i < tree.steiner_count(); ++i) {
    const int si = tree.steiner_global(i);
    for (int h = 0; h < i; ++h) {
      const int sh = tree.steiner_global(h);
      if (!tree.adjacent(si, sh) || distance(tree.position(si), tree.position(sh)) > eps) continue;
      if (detail::pair_crosses(tree, si, sh)) continue;
      for (const auto& r : reorganize(tree, i, h))
        if (r.tree.adjacent(si, sh) && detail::pair_crosses(r.tree, si, sh)) return r.vector;
    }
  }
  return std::nullopt;
}

namespace detail {

class Search {
 public:
  Search(std::span<const Point> points, const SearchOptions& opts, bool enhanced)
      : opts_(opts), enhanced_(enhanced), terms_(Terminals::make(points)) {
    opts_.validate();
    if (!(terms_->diameter > 0.0)) throw Error(ErrorCode::AllCoincident, "all points coincide");
  }

  SearchResult run() {
    const auto start = std::chrono::steady_clock::now();
    TopologyTree root(terms_);
    ++stats_.topologies_built;
    evaluate(root_, root);
    if (root.complete()) {
      record(root);
      root_.state = NodeState::Explored;
    } else {
      explore(root_, root);
    }
    stats_.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {std::move(best_), stats_, 0};
  }

 private:
  static bool done(NodeState s) {
    return s == NodeState::Explored || s == NodeState::Pruned || s == NodeState::Cut;
  }

  double incumbent() const { return best_.length; }

  // Null when the vector lies in a finished subtree or was already visited.
  BnbNode* unvisited(const TopologyVector& v) {
    BnbNode* node = &root_;
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (done(node->state)) return nullptr;
      node = &node->child(v[k]);
    }
    return node->state == NodeState::Unvisited ? node : nullptr;
  }

  void record(const TopologyTree& tree) {
    best_ = make_solution(tree, opts_.optimize.collision_eps);
  }

  void evaluate(BnbNode& node, TopologyTree& tree) {
    const bool leaf = tree.complete();
    if (leaf && !seen_leaf_) {
      seen_leaf_ = true;
      stats_.steps_to_first_leaf = stats_.optimizations;
    }
    node.state = NodeState::Active;
    ++stats_.optimizations;
    OptimizeOptions o = opts_.optimize;
    o.collision_detection = enhanced_ && !leaf;
    std::vector<SteinerPair> suppressed;
    bool fallback = false;
    for (;;) {
      auto out = optimize(tree, o, suppressed);
      fallback = fallback || out.sequential_fallback;
      if (out.kind != OptimizeStatus::CollisionDetected) {
        node.length = out.length;
        break;
      }
      suppressed.push_back(*out.collided_pair);
      jump(tree, *out.collided_pair);
    }
    if (fallback) ++stats_.jacobi_fallbacks;
    node.state = NodeState::Optimized;
  }

  void jump(const TopologyTree& tree, SteinerPair pair) {
    auto cands = reorganize(tree, pair.i, pair.h);
    std::vector<std::pair<double, int>> order;
    for (int c = 0; c < 2; ++c) {
      if (!unvisited(cands[c].vector)) continue;
      ++stats_.lower_bounds_computed;
      order.emplace_back(lower_bound(cands[c].tree), c);
    }
    std::sort(order.begin(), order.end());
    for (auto [bound, c] : order) {
      BnbNode* target = unvisited(cands[c].vector);
      if (!target) continue;
      if (bound > incumbent()) {
        target->state = NodeState::Pruned;
        ++stats_.nodes_cut;
        continue;
      }
      ++stats_.reorganizations_taken;
      TopologyTree t = cands[c].tree;
      evaluate(*target, t);
      if (target->length > incumbent()) cut(*target, t);
      else explore(*target, t);
    }
  }

  void cut(BnbNode& node, const TopologyTree& tree) {
    node.state = NodeState::Cut;
    ++stats_.nodes_cut;
    if (!opts_.twin_prune) return;
    auto twin = twin_prune_target(tree, opts_.optimize.collision_eps);
    if (!twin) return;
    if (BnbNode* t = unvisited(*twin)) {
      t->state = NodeState::Cut;
      ++stats_.nodes_cut;
      ++stats_.twin_cuts;
    }
  }

  void explore(BnbNode& node, TopologyTree& tree) {
    node.state = NodeState::Active;
    const int edges = tree.edge_count();
    std::vector<std::pair<int, TopologyTree>> good;

    auto visit = [&](int x) {
      BnbNode& child = node.child(x);
      if (child.state != NodeState::Unvisited) return;
      TopologyTree ct = merge_edge(tree, x);
      ++stats_.topologies_built;
      if (seen_leaf_) {
        if (opts_.lower_bound) {
          ++stats_.lower_bounds_computed;
          if (lower_bound(ct) > incumbent()) {
            child.state = NodeState::Pruned;
            ++stats_.nodes_cut;
            return;
          }
        }
        if (opts_.error_figure_pruning && error_figure_would_prune(ct, incumbent())) {
          child.state = NodeState::Pruned;
          ++stats_.nodes_cut;
          return;
        }
      }
      evaluate(child, ct);
      if (child.length > incumbent()) return cut(child, ct);
      if (ct.complete()) {
        if (child.length < incumbent()) record(ct);
        child.state = NodeState::Explored;
        return;
      }
      good.emplace_back(x, std::move(ct));
    };

    if (enhanced_) {
      for (int x = edges; x >= 1; --x) visit(x);
    } else {
      for (int x = 1; x <= edges; ++x) visit(x);
    }

    std::stable_sort(good.begin(), good.end(), [&](const auto& a, const auto& b) {
      const double la = node.children[a.first]->length, lb = node.children[b.first]->length;
      return la != lb ? la < lb : a.first < b.first;
    });
    for (auto& [x, ct] : good) {
      BnbNode& child = *node.children[x];
      if (child.state != NodeState::Optimized) continue;
      if (child.length < incumbent()) {
        explore(child, ct);
      } else {
        child.state = NodeState::Cut;
        ++stats_.nodes_cut;
      }
    }
    node.state = NodeState::Explored;
    node.children.clear();
  }

  SearchOptions opts_;
  bool enhanced_;
  std::shared_ptr<const Terminals> terms_;
  BnbNode root_;
  Solution best_;
  SearchStats stats_;
  bool seen_leaf_ = false;
};

}  // namespace detail

/// Depth-first scheme: optimize all children, descend smallest first.
inline SearchResult solve_original(std::span<const Point> points, const SearchOptions& opts = {}) {
  return detail::Search(points, opts, false).run();
}

/// Depth-first scheme with reorganization jumps on Steiner collisions.
inline SearchResult solve_enhanced(std::span<const Point> points, const SearchOptions& opts = {}) {
  return detail::Search(points, opts, true).run();
}

/// Optimizes every full topology. With count_only, just walks the vectors.
inline SearchResult enumerate_all(std::span<const Point> points, const SearchOptions& opts = {}, bool count_only = false) {
  opts.validate();
  auto terms = Terminals::make(points);
  if (terms->count > opts.enumerate_cap)
    throw Error(ErrorCode::CapExceeded, "enumeration is capped at N = " + std::to_string(opts.enumerate_cap));
  if (!count_only && !(terms->diameter > 0.0)) throw Error(ErrorCode::AllCoincident, "all points coincide");
  const auto start = std::chrono::steady_clock::now();
  SearchResult res;
  OptimizeOptions o = opts.optimize;
  o.collision_detection = false;
  const int depth = terms->count - 3;

  auto walk = [&](auto&& self, const TopologyVector& prefix) -> void {
    if (static_cast<int>(prefix.size()) == depth) {
      ++res.leaves;
      return;
    }
    for (int t = 1; t <= 2 * static_cast<int>(prefix.size()) + 3; ++t) self(self, prefix.with(t));
  };
  auto build = [&](auto&& self, const TopologyTree& tree) -> void {
    ++res.stats.topologies_built;
    if (tree.complete()) {
      ++res.leaves;
      TopologyTree t = tree;
      auto out = optimize(t, o);
      ++res.stats.optimizations;
      if (out.sequential_fallback) ++res.stats.jacobi_fallbacks;
      if (out.length < res.solution.length) res.solution = make_solution(t, opts.optimize.collision_eps);
      return;
    }
    for (int t = 1; t <= tree.edge_count(); ++t) self(self, merge_edge(tree, t));
  };
  if (count_only) walk(walk, TopologyVector{});
  else build(build, TopologyTree(terms));
  res.stats.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

}  // namespace steiner

#endif  // STEINER_ENGINE_HPP
