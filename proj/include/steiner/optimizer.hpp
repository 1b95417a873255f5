#ifndef STEINER_OPTIMIZER_HPP
#define STEINER_OPTIMIZER_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "steiner/geometry.hpp"
#include "steiner/topology.hpp"

namespace steiner {

struct OptimizeOptions {
  double conv_eps = 1e-10;      // stop when E < conv_eps * L
  double collision_eps = 1e-4;  // fraction of the bounding-box diameter
  int max_iters = 1000;
  bool collision_detection = true;

  void validate() const {
    if (!(conv_eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "conv_eps must be positive");
    if (!(collision_eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "collision_eps must be positive");
    if (max_iters < 1) throw Error(ErrorCode::InvalidArgument, "max_iters must be at least 1");
  }
};

/// Adjacent Steiner ordinals with i > h.
struct SteinerPair {
  int i = 0;
  int h = 0;
  friend bool operator==(const SteinerPair&, const SteinerPair&) = default;
};

enum class OptimizeStatus { Converged, CollisionDetected, IterationLimit };

struct OptimizeOutcome {
  OptimizeStatus kind = OptimizeStatus::Converged;
  double length = 0.0;
  std::optional<SteinerPair> collided_pair;
  int iterations = 0;
  bool sequential_fallback = false;  // Jacobi sweep raised the length; switched to in-place sweeps
};

inline double tree_length(const TopologyTree& tree) {
  double total = 0.0;
  for (int e = 1; e <= tree.edge_count(); ++e) {
    const auto ends = tree.edge(e);
    total += distance(tree.position(ends[0]), tree.position(ends[1]));
  }
  return total;
}

/// One simultaneous sweep: every Steiner point moves to the Fermat point of its
/// neighbors' positions from before the sweep.
inline void iterate_once(TopologyTree& tree) {
  const int dim = tree.dim();
  std::vector<double> next(static_cast<std::size_t>(tree.steiner_count()) * dim);
  for (int k = 0; k < tree.steiner_count(); ++k) {
    const auto& nb = tree.neighbors(tree.steiner_global(k));
    fermat_point_into(tree.position(nb[0]), tree.position(nb[1]), tree.position(nb[2]),
                      MutCoords(next).subspan(static_cast<std::size_t>(k) * dim, dim));
  }
  auto pos = tree.steiner_positions();
  std::copy(next.begin(), next.end(), pos.begin());
}

/// In-place sweep in ordinal order; each update sees the latest positions.
/// Coordinate descent on the tree length: a move is kept only if it does not
/// lengthen the three incident edges, so rounding cannot raise the length.
inline void iterate_sequential(TopologyTree& tree) {
  std::vector<double> scratch(static_cast<std::size_t>(tree.dim()));
  for (int k = 0; k < tree.steiner_count(); ++k) {
    const auto& nb = tree.neighbors(tree.steiner_global(k));
    const auto a = tree.position(nb[0]), b = tree.position(nb[1]), c = tree.position(nb[2]);
    fermat_point_into(a, b, c, scratch);
    auto dst = tree.steiner_position(k);
    const double old_cost = distance(dst, a) + distance(dst, b) + distance(dst, c);
    const double new_cost = distance(scratch, a) + distance(scratch, b) + distance(scratch, c);
    if (new_cost <= old_cost) std::copy(scratch.begin(), scratch.end(), dst.begin());
  }
}

/// Angle-deficit error figure E: the root of the summed pos(2 u.v + |u||v|)
/// over the three neighbor pairs of every Steiner point.
inline double error_figure(const TopologyTree& tree) {
  double sum = 0.0;
  const int dim = tree.dim();
  for (int k = 0; k < tree.steiner_count(); ++k) {
    const auto x = tree.steiner_position(k);
    const auto& nb = tree.neighbors(tree.steiner_global(k));
    for (int a = 0; a < 3; ++a) {
      for (int b = a + 1; b < 3; ++b) {
        const auto p = tree.position(nb[a]);
        const auto q = tree.position(nb[b]);
        double uv = 0.0, uu = 0.0, vv = 0.0;
        for (int c = 0; c < dim; ++c) {
          const double u = p[c] - x[c];
          const double v = q[c] - x[c];
          uv += u * v;
          uu += u * u;
          vv += v * v;
        }
        sum += std::max(0.0, 2.0 * uv + std::sqrt(uu * vv));
      }
    }
  }
  return std::sqrt(sum);
}

/// First adjacent Steiner pair (smallest i, then smallest h) closer than `eps_abs`.
inline std::optional<SteinerPair> detect_collision(const TopologyTree& tree, double eps_abs,
                                                   std::span<const SteinerPair> suppressed = {}) {
  const double eps2 = eps_abs * eps_abs;
  for (int i = 1; i < tree.steiner_count(); ++i) {
    const int gi = tree.steiner_global(i);
    std::optional<SteinerPair> best;
    for (int w : tree.neighbors(gi)) {
      if (!tree.is_steiner(w)) continue;
      const int h = tree.steiner_ordinal(w);
      if (h >= i) continue;
      if (squared_distance(tree.steiner_position(i), tree.steiner_position(h)) > eps2) continue;
      const SteinerPair pair{i, h};
      if (std::find(suppressed.begin(), suppressed.end(), pair) != suppressed.end()) continue;
      if (!best || h < best->h) best = pair;
    }
    if (best) return best;
  }
  return std::nullopt;
}

namespace detail {

// A few Weiszfeld steps towards the geometric median of `sites` (Vardi-Zhang
// fix when the iterate lands on a site). `q` holds the start and the result;
// repeated sweeps finish the job, so the step count stays small.
inline void weiszfeld(const std::vector<const double*>& sites, std::vector<double>& q, double scale) {
  const std::size_t dim = q.size();
  const double tiny = 1e-15 * (scale > 0.0 ? scale : 1.0);
  std::vector<double> num(dim), pull(dim), next(dim);
  // Optimum at a site when the unit pulls of the others do not exceed 1;
  // Weiszfeld steps only crawl towards such a point.
  for (const double* y : sites) {
    std::fill(pull.begin(), pull.end(), 0.0);
    double eta = 0.0;
    for (const double* z : sites) {
      double d2 = 0.0;
      for (std::size_t c = 0; c < dim; ++c) d2 += (z[c] - y[c]) * (z[c] - y[c]);
      const double d = std::sqrt(d2);
      if (d <= tiny) {
        eta += 1.0;
        continue;
      }
      for (std::size_t c = 0; c < dim; ++c) pull[c] += (z[c] - y[c]) / d;
    }
    if (norm(pull) <= eta) {
      q.assign(y, y + dim);
      return;
    }
  }
  for (int it = 0; it < 10; ++it) {
    std::fill(num.begin(), num.end(), 0.0);
    std::fill(pull.begin(), pull.end(), 0.0);
    double den = 0.0, eta = 0.0;
    for (const double* y : sites) {
      double d2 = 0.0;
      for (std::size_t c = 0; c < dim; ++c) d2 += (y[c] - q[c]) * (y[c] - q[c]);
      const double d = std::sqrt(d2);
      if (d <= tiny) {
        eta += 1.0;
        continue;
      }
      for (std::size_t c = 0; c < dim; ++c) {
        num[c] += y[c] / d;
        pull[c] += (y[c] - q[c]) / d;
      }
      den += 1.0 / d;
    }
    if (den == 0.0) return;
    const double r = norm(pull);
    if (eta > 0.0 && r <= eta) return;
    const double keep = eta > 0.0 ? eta / r : 0.0;
    double step = 0.0;
    for (std::size_t c = 0; c < dim; ++c) {
      next[c] = (1.0 - keep) * (num[c] / den) + keep * q[c];
      step = std::max(step, std::abs(next[c] - q[c]));
    }
    q.swap(next);
    if (step <= tiny) return;
  }
}

// Fermat sweeps move one Steiner point at a time, so a group of coincident
// Steiner points can get stuck where moving the group jointly would shorten
// the tree. For every cluster of (nearly) coincident Steiner points, merges the
// connected sub-group with the largest gain at the geometric median of its
// outer neighbors. Returns true when the tree got shorter.
inline bool move_coincident_groups(TopologyTree& tree, double tol_abs) {
  const int n_steiner = tree.steiner_count();
  const int dim = tree.dim();
  const double tol2 = tol_abs * tol_abs;

  // Union-find over Steiner points joined by (near) zero-length edges.
  std::vector<int> root(static_cast<std::size_t>(n_steiner));
  for (int k = 0; k < n_steiner; ++k) root[k] = k;
  auto find = [&](int k) {
    while (root[k] != k) k = root[k] = root[root[k]];
    return k;
  };
  bool any = false;
  for (int k = 0; k < n_steiner; ++k) {
    for (int w : tree.neighbors(tree.steiner_global(k))) {
      if (!tree.is_steiner(w)) continue;
      const int h = tree.steiner_ordinal(w);
      if (h < k && squared_distance(tree.steiner_position(k), tree.steiner_position(h)) <= tol2) {
        root[find(k)] = find(h);
        any = true;
      }
    }
  }
  if (!any) return false;

  std::vector<std::vector<int>> clusters;
  {
    std::vector<int> slot(static_cast<std::size_t>(n_steiner), -1);
    for (int k = 0; k < n_steiner; ++k) {
      const int r = find(k);
      if (slot[r] < 0) {
        slot[r] = static_cast<int>(clusters.size());
        clusters.emplace_back();
      }
      clusters[slot[r]].push_back(k);
    }
  }

  bool moved = false;
  for (const auto& cluster : clusters) {
    const int m = static_cast<int>(cluster.size());
    if (m < 2 || m > 12) continue;
    double best_gain = 0.0;
    std::vector<int> best_group;
    std::vector<double> best_target;

    for (unsigned subset = 1; subset < (1u << m); ++subset) {
      if (__builtin_popcount(subset) < 2) continue;
      std::vector<char> in_group(static_cast<std::size_t>(n_steiner), 0);
      std::vector<int> group;
      for (int b = 0; b < m; ++b)
        if (subset & (1u << b)) {
          in_group[cluster[b]] = 1;
          group.push_back(cluster[b]);
        }
      // Only connected groups (through zero-length edges) matter.
      {
        std::vector<int> stack{group.front()};
        std::vector<char> seen(static_cast<std::size_t>(n_steiner), 0);
        seen[group.front()] = 1;
        int reached = 1;
        while (!stack.empty()) {
          const int v = stack.back();
          stack.pop_back();
          for (int w : tree.neighbors(tree.steiner_global(v))) {
            if (!tree.is_steiner(w)) continue;
            const int h = tree.steiner_ordinal(w);
            if (in_group[h] && !seen[h]) {
              seen[h] = 1;
              ++reached;
              stack.push_back(h);
            }
          }
        }
        if (reached != static_cast<int>(group.size())) continue;
      }

      // Candidate: the whole group merged at the geometric median of its outer neighbors.
      std::vector<const double*> sites;
      std::vector<double> target(static_cast<std::size_t>(dim), 0.0);
      double current = 0.0;
      for (int k : group) {
        const auto x = tree.steiner_position(k);
        for (int c = 0; c < dim; ++c) target[c] += x[c] / static_cast<double>(group.size());
        for (int w : tree.neighbors(tree.steiner_global(k))) {
          const bool inner = tree.is_steiner(w) && in_group[tree.steiner_ordinal(w)];
          if (inner && tree.steiner_ordinal(w) < k) continue;
          current += distance(x, tree.position(w));
          if (!inner) sites.push_back(tree.position(w).data());
        }
      }
      weiszfeld(sites, target, tree.scale());
      double merged = 0.0;
      for (const double* y : sites) merged += distance(target, ConstCoords(y, static_cast<std::size_t>(dim)));
      const double gain = current - merged;
      if (gain > best_gain) {
        best_gain = gain;
        best_group = group;
        best_target = target;
      }
    }
    if (best_gain > 1e-15 * (tree.scale() > 0 ? tree.scale() : 1.0)) {
      for (int k : best_group) std::copy(best_target.begin(), best_target.end(), tree.steiner_position(k).begin());
      moved = true;
    }
  }
  return moved;
}

}  // namespace detail

/// Runs Fermat sweeps until the error figure drops below conv_eps * L, an
/// adjacent Steiner pair collides (when detection is on and the pair is not
/// suppressed), or max_iters sweeps have run. The optional trace receives the
/// tree length before the first sweep and after every sweep.
inline OptimizeOutcome optimize(TopologyTree& tree, const OptimizeOptions& opts,
                                std::span<const SteinerPair> suppressed = {}, std::vector<double>* trace = nullptr) {
  OptimizeOutcome out;
  const double scale = tree.scale() > 0.0 ? tree.scale() : 1.0;
  const double collision_abs = opts.collision_eps * scale;
  const double still = 1e-14 * scale;
  const double coincident = 1e-3 * scale;
  constexpr double kSlack = 1e-12;

  double length = tree_length(tree);
  if (trace) trace->push_back(length);
  bool sequential = false;
  std::vector<double> saved;

  for (int iter = 1; iter <= opts.max_iters; ++iter) {
    out.iterations = iter;
    const auto before = tree.steiner_positions();
    saved.assign(before.begin(), before.end());

    double next = 0.0;
    if (!sequential) {
      iterate_once(tree);
      next = tree_length(tree);
      if (next > length + kSlack || !(next < length)) {
        // Jacobi sweep raised (or failed to lower) the length: redo in place.
        if (next > length + kSlack) out.sequential_fallback = true;
        sequential = true;
        auto pos = tree.steiner_positions();
        std::copy(saved.begin(), saved.end(), pos.begin());
      }
    }
    if (sequential) {
      iterate_sequential(tree);
      detail::move_coincident_groups(tree, coincident);
      next = tree_length(tree);
    }

    double moved = 0.0;
    {
      const auto after = tree.steiner_positions();
      for (std::size_t c = 0; c < after.size(); ++c) moved = std::max(moved, std::abs(after[c] - saved[c]));
    }
    length = next;
    if (trace) trace->push_back(length);

    if (opts.collision_detection) {
      if (auto pair = detect_collision(tree, collision_abs, suppressed)) {
        out.kind = OptimizeStatus::CollisionDetected;
        out.collided_pair = pair;
        out.length = length;
        return out;
      }
    }

    const bool small_error = error_figure(tree) < opts.conv_eps * length;
    if (small_error || moved <= still) {
      if (detail::move_coincident_groups(tree, coincident)) {
        length = tree_length(tree);
        if (trace) trace->push_back(length);
        continue;
      }
      if (small_error || sequential) {
        out.kind = OptimizeStatus::Converged;
        out.length = length;
        return out;
      }
      sequential = true;
    }
  }
  out.kind = OptimizeStatus::IterationLimit;
  out.length = length;
  return out;
}

/// Angle in degrees at `apex` between the rays to p and q; NaN for a zero-length ray.
inline double angle_degrees(ConstCoords apex, ConstCoords p, ConstCoords q) {
  double uv = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t k = 0; k < apex.size(); ++k) {
    const double u = p[k] - apex[k];
    const double v = q[k] - apex[k];
    uv += u * v;
    uu += u * u;
    vv += v * v;
  }
  if (uu == 0.0 || vv == 0.0) return std::nan("");
  return std::acos(std::clamp(uv / std::sqrt(uu * vv), -1.0, 1.0)) * 180.0 / M_PI;
}

}  // namespace steiner

#endif  // STEINER_OPTIMIZER_HPP
