#ifndef STEINER_BOUNDS_HPP
#define STEINER_BOUNDS_HPP

#include <array>
#include <optional>
#include <vector>

#include "steiner/geometry.hpp"
#include "steiner/optimizer.hpp"
#include "steiner/topology.hpp"

namespace steiner {

/// One contraction: Steiner ordinal, the cherry (global node ids, or -1-k for
/// the k-th equilateral point made earlier) and the equilateral point that
/// replaced them.
struct Contraction {
  int steiner = -1;
  std::array<int, 2> cherry{};
  Point e;
};

/// Working tree of the cherry contraction. Leaves are regular points or
/// equilateral points; interior nodes are the remaining Steiner points.
class ContractionState {
 public:
  explicit ContractionState(const TopologyTree& tree) : tree_(&tree) {
    const auto& adj = tree.adjacency();
    nbr_.resize(adj.size());
    alive_.assign(adj.size(), 0);
    coords_.resize(adj.size());
    for (std::size_t v = 0; v < adj.size(); ++v) {
      if (!tree.active(static_cast<int>(v))) continue;
      alive_[v] = 1;
      coords_[v] = Point(tree.position(static_cast<int>(v)));
      for (int w : adj[v])
        if (w != TopologyTree::kNone) nbr_[v].push_back(w);
    }
  }

  bool is_leaf(int v) const { return alive_[v] && nbr_[v].size() == 1; }
  bool is_interior(int v) const { return alive_[v] && nbr_[v].size() == 3; }
  const std::vector<Contraction>& log() const { return log_; }

  /// Smallest-ordinal remaining Steiner point with at least two leaf neighbors.
  std::optional<int> find_cherry() const {
    for (int k = 0; k < tree_->steiner_count(); ++k) {
      const int g = tree_->steiner_global(k);
      if (!is_interior(g)) continue;
      int leaves = 0;
      for (int w : nbr_[g]) leaves += is_leaf(w) ? 1 : 0;
      if (leaves >= 2) return k;
    }
    return std::nullopt;
  }

  /// Contracts the cherry of Steiner ordinal k. Returns the final distance when
  /// only two points remain afterwards, nullopt otherwise. Throws
  /// DegenerateCherry when no equilateral point can be built.
  std::optional<double> contract(int k) {
    const int g = tree_->steiner_global(k);
    int a = -1, b = -1, c = -1;
    for (int w : nbr_[g]) {
      if (is_leaf(w) && a < 0) a = w;
      else if (is_leaf(w) && b < 0) b = w;
      else c = w;
    }
    std::optional<Point> e = try_equilateral_point(coords_[a], coords_[b], coords_[c]);
    if (!e) {
      // The third neighbor only picks a side; any other point of the tree will do.
      Point ref = centroid_excluding(a, b, g);
      if (ref.dim() > 0) e = try_equilateral_point(coords_[a], coords_[b], ref);
    }
    if (!e) throw Error(ErrorCode::DegenerateCherry, "cherry is collinear with the rest of the tree");

    log_.push_back({k, {label(a), label(b)}, *e});
    // The Steiner node becomes the equilateral leaf hanging off c.
    alive_[a] = alive_[b] = 0;
    nbr_[g] = {c};
    coords_[g] = *e;
    equilateral_.push_back(g);
    if (is_leaf(c)) return distance(coords_[g], coords_[c]);
    return std::nullopt;
  }

 private:
  int label(int v) const {
    for (std::size_t k = 0; k < equilateral_.size(); ++k)
      if (equilateral_[k] == v) return -1 - static_cast<int>(k);
    return v;
  }

  Point centroid_excluding(int a, int b, int g) const {
    Point sum(static_cast<std::size_t>(tree_->dim()));
    int count = 0;
    for (std::size_t v = 0; v < nbr_.size(); ++v) {
      const int vi = static_cast<int>(v);
      if (!is_leaf(vi) || vi == a || vi == b || vi == g) continue;
      sum = sum + coords_[v];
      ++count;
    }
    if (count == 0) return Point();
    return (1.0 / count) * sum;
  }

  const TopologyTree* tree_;
  std::vector<std::vector<int>> nbr_;
  std::vector<char> alive_;
  std::vector<Point> coords_;
  std::vector<int> equilateral_;
  std::vector<Contraction> log_;
};

/// Smallest-ordinal Steiner point of the tree with two regular neighbors.
inline int find_cherry(const TopologyTree& tree) {
  auto k = ContractionState(tree).find_cherry();
  if (!k) throw Error(ErrorCode::InvalidTopology, "tree has no cherry");
  return *k;
}

/// Lower bound on the length of any tree with this topology, by successive
/// cherry contraction. Returns 0 when a contraction is degenerate.
inline double lower_bound(const TopologyTree& tree, std::vector<Contraction>* log = nullptr) {
  ContractionState state(tree);
  try {
    for (;;) {
      auto k = state.find_cherry();
      if (!k) throw Error(ErrorCode::InvalidTopology, "tree has no cherry");
      if (auto done = state.contract(*k)) {
        if (log) *log = state.log();
        return *done;
      }
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateCherry) throw;
    if (log) *log = state.log();
    return 0.0;
  }
}

/// The pre-optimization test L - E < L* on an unoptimized tree. Kept for
/// diagnostics only: it is not a valid pruning rule.
inline bool error_figure_would_prune(const TopologyTree& tree, double incumbent) {
  return !(tree_length(tree) - error_figure(tree) < incumbent);
}

}  // namespace steiner

#endif  // STEINER_BOUNDS_HPP
