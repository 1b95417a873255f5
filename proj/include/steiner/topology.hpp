#ifndef STEINER_TOPOLOGY_HPP
#define STEINER_TOPOLOGY_HPP

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "steiner/error.hpp"
#include "steiner/geometry.hpp"

namespace steiner {

/// Split-edge encoding of a full topology: entry i-1 is the index of the edge
/// deleted when Steiner point S_i (and regular point i+2) was inserted.
class TopologyVector {
 public:
  TopologyVector() = default;
  TopologyVector(std::initializer_list<int> entries) : entries_(entries) {}
  explicit TopologyVector(std::vector<int> entries) : entries_(std::move(entries)) {}

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  int operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<int>& entries() const noexcept { return entries_; }

  void push_back(int t) { entries_.push_back(t); }
  void pop_back() { entries_.pop_back(); }

  TopologyVector with(int t) const {
    TopologyVector v = *this;
    v.push_back(t);
    return v;
  }

  TopologyVector prefix(std::size_t len) const {
    return TopologyVector(std::vector<int>(entries_.begin(), entries_.begin() + static_cast<std::ptrdiff_t>(len)));
  }

  /// Each t_i must name an edge that exists when S_i is inserted.
  bool valid() const {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const int limit = 2 * static_cast<int>(i) + 3;
      if (entries_[i] < 1 || entries_[i] > limit) return false;
    }
    return true;
  }

  /// Dash-joined text, e.g. "3-5-3-9-11-7-7"; the root topology is "".
  std::string to_string() const {
    std::string out;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (i) out += '-';
      out += std::to_string(entries_[i]);
    }
    return out;
  }

  static TopologyVector parse(std::string_view text) {
    TopologyVector v;
    if (text.empty()) return v;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t dash = std::min(text.find('-', pos), text.size());
      int value = 0;
      const auto* first = text.data() + pos;
      const auto* last = text.data() + dash;
      auto [ptr, ec] = std::from_chars(first, last, value);
      if (ec != std::errc() || ptr != last || first == last)
        throw Error(ErrorCode::InvalidTopology, "malformed topology text '" + std::string(text) + "'");
      v.push_back(value);
      pos = dash + 1;
    }
    if (!v.valid()) throw Error(ErrorCode::InvalidTopology, "edge index out of range in '" + std::string(text) + "'");
    return v;
  }

  friend bool operator==(const TopologyVector&, const TopologyVector&) = default;
  friend auto operator<=>(const TopologyVector&, const TopologyVector&) = default;

 private:
  std::vector<int> entries_;
};

struct TopologyVectorHash {
  std::size_t operator()(const TopologyVector& v) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (int t : v.entries()) {
      h ^= static_cast<std::size_t>(t) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h ^ v.size();
  }
};

/// Regular points of one instance, shared read-only between trees.
struct Terminals {
  int count = 0;
  int dim = 0;
  std::vector<double> coords;  // count * dim
  double diameter = 0.0;       // bounding-box diameter

  ConstCoords point(int i) const {
    return ConstCoords(coords).subspan(static_cast<std::size_t>(i) * dim, dim);
  }

  static std::shared_ptr<const Terminals> make(std::span<const Point> points) {
    if (points.size() < 3) throw Error(ErrorCode::TooFewPoints, "at least three regular points are required");
    if (points.size() > 64) throw Error(ErrorCode::InvalidArgument, "at most 64 regular points are supported");
    auto t = std::make_shared<Terminals>();
    t->count = static_cast<int>(points.size());
    t->dim = static_cast<int>(points.front().dim());
    if (t->dim < 2) throw Error(ErrorCode::DimensionMismatch, "dimension must be at least 2");
    t->coords.reserve(points.size() * points.front().dim());
    for (const Point& p : points) {
      if (static_cast<int>(p.dim()) != t->dim)
        throw Error(ErrorCode::DimensionMismatch, "all points must share one dimension");
      if (!p.finite()) throw Error(ErrorCode::InvalidArgument, "non-finite coordinate");
      t->coords.insert(t->coords.end(), p.coords().begin(), p.coords().end());
    }
    t->diameter = bounding_box_diameter(t->coords, static_cast<std::size_t>(t->dim));
    return t;
  }
};

/// Insertion-time record: when S_i was inserted next to Steiner point `steiner`,
/// e1 and e2 were the other two edges incident to it. e2 is the edge leading
/// towards that Steiner point's own regular point when there is one.
struct Triplet {
  int steiner = -1;  // global index
  int e1 = 0;
  int e2 = 0;
  friend bool operator==(const Triplet&, const Triplet&) = default;
};

using NodeTriple = std::array<int, 3>;
using SplitMask = std::uint64_t;

namespace detail {

// For a tree given by neighbor triples (regular nodes use slot 0 only), returns
// per node the mask of regular points in its subtree when rooted at regular 0.
// Entry 0 holds the full mask. Absent nodes keep mask 0.
inline std::vector<SplitMask> subtree_masks(const std::vector<NodeTriple>& nbr, int regular_count,
                                            std::vector<int>* parent_out = nullptr) {
  const int n = static_cast<int>(nbr.size());
  std::vector<SplitMask> mask(n, 0);
  std::vector<int> parent(n, -2);
  std::vector<int> order;
  order.reserve(n);
  std::vector<int> stack{0};
  parent[0] = -1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    order.push_back(v);
    for (int w : nbr[v]) {
      if (w < 0 || w == parent[v]) continue;
      parent[w] = v;
      stack.push_back(w);
    }
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int v = *it;
    if (v < regular_count) mask[v] |= SplitMask{1} << v;
    if (parent[v] >= 0) mask[parent[v]] |= mask[v];
  }
  if (parent_out) *parent_out = std::move(parent);
  return mask;
}

// Sorted split signature of a Steiner node: the masks (side without regular 0)
// of its three incident edges.
inline std::array<SplitMask, 3> steiner_signature(int v, const std::vector<NodeTriple>& nbr,
                                                  const std::vector<SplitMask>& mask,
                                                  const std::vector<int>& parent) {
  std::array<SplitMask, 3> sig{};
  for (int s = 0; s < 3; ++s) {
    const int w = nbr[v][s];
    sig[s] = (w == parent[v]) ? mask[v] : mask[w];
  }
  std::sort(sig.begin(), sig.end());
  return sig;
}

}  // namespace detail

/// A concrete full topology on regular points 0..k+2 with Steiner points S_0..S_k.
/// Global index of regular point j is j; S_i has global index N + i.
class TopologyTree {
 public:
  static constexpr int kNone = -1;

  /// The root topology: regular points 0, 1, 2 joined to S_0 by edges 1, 2, 3.
  explicit TopologyTree(std::shared_ptr<const Terminals> terminals) : terms_(std::move(terminals)) {
    if (!terms_ || terms_->count < 3) throw Error(ErrorCode::TooFewPoints, "at least three regular points are required");
    const int n = terms_->count;
    nbr_.assign(static_cast<std::size_t>(2 * n - 2), NodeTriple{kNone, kNone, kNone});
    nbr_edge_.assign(nbr_.size(), NodeTriple{0, 0, 0});
    edges_.assign(static_cast<std::size_t>(2 * n - 2), {kNone, kNone});
    steiner_pos_.assign(static_cast<std::size_t>(n - 2) * dim(), 0.0);
    triplets_.assign(static_cast<std::size_t>(n - 2), {});
    const int s0 = n;
    for (int j = 0; j < 3; ++j) {
      edges_[j + 1] = {j, s0};
      nbr_[s0][j] = j;
      nbr_edge_[s0][j] = j + 1;
      nbr_[j][0] = s0;
      nbr_edge_[j][0] = j + 1;
    }
    place_new_steiner(0);
  }

  const std::shared_ptr<const Terminals>& terminals() const noexcept { return terms_; }
  int regular_count() const noexcept { return terms_->count; }
  int dim() const noexcept { return terms_->dim; }
  double scale() const noexcept { return terms_->diameter; }

  /// Number of merges performed (length of the topology vector).
  int insertions() const noexcept { return static_cast<int>(vector_.size()); }
  int steiner_count() const noexcept { return insertions() + 1; }
  int inserted_regular_count() const noexcept { return insertions() + 3; }
  int edge_count() const noexcept { return 2 * insertions() + 3; }
  bool complete() const noexcept { return inserted_regular_count() == regular_count(); }

  int steiner_global(int ordinal) const noexcept { return regular_count() + ordinal; }
  int steiner_ordinal(int global) const noexcept { return global - regular_count(); }
  bool is_steiner(int global) const noexcept { return global >= regular_count(); }

  const TopologyVector& vector() const noexcept { return vector_; }

  /// Extremities of edge `index` (1-based).
  std::array<int, 2> edge(int index) const {
    if (index < 1 || index > edge_count()) throw Error(ErrorCode::NoSuchEdge, "edge " + std::to_string(index) + " does not exist");
    return edges_[index];
  }

  const NodeTriple& neighbors(int global) const { return nbr_[global]; }
  const NodeTriple& neighbor_edges(int global) const { return nbr_edge_[global]; }
  const std::vector<NodeTriple>& adjacency() const noexcept { return nbr_; }

  int degree(int global) const {
    return static_cast<int>(std::count_if(nbr_[global].begin(), nbr_[global].end(), [](int w) { return w != kNone; }));
  }

  bool adjacent(int a, int b) const {
    const auto& n = nbr_[a];
    return std::find(n.begin(), n.end(), b) != n.end();
  }

  ConstCoords position(int global) const {
    if (global < regular_count()) return terms_->point(global);
    return steiner_position(steiner_ordinal(global));
  }

  ConstCoords steiner_position(int ordinal) const {
    return ConstCoords(steiner_pos_).subspan(static_cast<std::size_t>(ordinal) * dim(), dim());
  }
  MutCoords steiner_position(int ordinal) {
    return MutCoords(steiner_pos_).subspan(static_cast<std::size_t>(ordinal) * dim(), dim());
  }

  /// Flat positions of the active Steiner points (steiner_count() * dim()).
  ConstCoords steiner_positions() const {
    return ConstCoords(steiner_pos_).first(static_cast<std::size_t>(steiner_count()) * dim());
  }
  MutCoords steiner_positions() {
    return MutCoords(steiner_pos_).first(static_cast<std::size_t>(steiner_count()) * dim());
  }

  const std::vector<Triplet>& triplets(int ordinal) const { return triplets_[ordinal]; }

  /// Splits edge `t` and inserts S_i together with regular point i + 2, where
  /// i is the next Steiner ordinal.
  void merge_edge(int t) {
    const int i = insertions() + 1;
    const int n = regular_count();
    if (i + 2 >= n) throw Error(ErrorCode::NoMoreRegularPoints, "all regular points are already inserted");
    if (t < 1 || t > edge_count()) throw Error(ErrorCode::NoSuchEdge, "edge " + std::to_string(t) + " does not exist");

    const int p1 = std::min(edges_[t][0], edges_[t][1]);
    const int p2 = std::max(edges_[t][0], edges_[t][1]);
    const int s = n + i;
    const int r = i + 2;

    for (int p : {p1, p2}) {
      if (is_steiner(p)) triplets_[i].push_back(make_triplet(p, t));
    }

    edges_[t] = {p1, s};
    edges_[2 * i + 3] = {p2, s};
    edges_[2 * i + 2] = {r, s};
    replace_neighbor(p1, p2, s, t);
    replace_neighbor(p2, p1, s, 2 * i + 3);
    nbr_[s] = {p1, p2, r};
    nbr_edge_[s] = {t, 2 * i + 3, 2 * i + 2};
    nbr_[r][0] = s;
    nbr_edge_[r][0] = 2 * i + 2;
    vector_.push_back(t);
    place_new_steiner(i);
  }

  /// Per-node subtree masks with the tree rooted at regular point 0.
  std::vector<SplitMask> subtree_masks(std::vector<int>* parent = nullptr) const {
    return detail::subtree_masks(nbr_, regular_count(), parent);
  }

  /// Sorted split masks of all edges; equal forms mean equal labeled topologies.
  std::vector<SplitMask> canonical_form() const {
    const auto mask = subtree_masks();
    std::vector<SplitMask> out;
    for (int v = 1; v < static_cast<int>(nbr_.size()); ++v)
      if (active(v)) out.push_back(mask[v]);
    std::sort(out.begin(), out.end());
    return out;
  }

  bool active(int global) const {
    if (global < regular_count()) return global < inserted_regular_count();
    return steiner_ordinal(global) < steiner_count();
  }

 private:
  void replace_neighbor(int node, int old_nbr, int new_nbr, int edge_index) {
    for (int s = 0; s < 3; ++s) {
      if (nbr_[node][s] == old_nbr) {
        nbr_[node][s] = new_nbr;
        nbr_edge_[node][s] = edge_index;
        return;
      }
    }
  }

  // True when the component reached from `start` without passing through
  // `blocked` contains `target`.
  bool side_contains(int blocked, int start, int target) const {
    std::vector<int> stack{start};
    std::vector<int> from{blocked};
    while (!stack.empty()) {
      const int v = stack.back();
      const int p = from.back();
      stack.pop_back();
      from.pop_back();
      if (v == target) return true;
      for (int w : nbr_[v]) {
        if (w == kNone || w == p) continue;
        stack.push_back(w);
        from.push_back(v);
      }
    }
    return false;
  }

  Triplet make_triplet(int p, int split_edge) const {
    Triplet tr;
    tr.steiner = p;
    int others[2];
    int others_nbr[2];
    int c = 0;
    for (int s = 0; s < 3; ++s) {
      if (nbr_edge_[p][s] == split_edge) continue;
      others[c] = nbr_edge_[p][s];
      others_nbr[c] = nbr_[p][s];
      ++c;
    }
    const int ordinal = steiner_ordinal(p);
    int towards_r = -1;
    if (ordinal >= 1) {
      for (int k = 0; k < 2; ++k)
        if (side_contains(p, others_nbr[k], ordinal + 2)) towards_r = k;
    }
    if (towards_r == 0) {
      tr.e1 = others[1];
      tr.e2 = others[0];
    } else if (towards_r == 1) {
      tr.e1 = others[0];
      tr.e2 = others[1];
    } else {
      tr.e1 = std::min(others[0], others[1]);
      tr.e2 = std::max(others[0], others[1]);
    }
    return tr;
  }

  // New Steiner point starts at the centroid of its neighbors, nudged along a
  // fixed pattern scaled by the instance diameter.
  void place_new_steiner(int ordinal) {
    const int g = steiner_global(ordinal);
    auto out = steiner_position(ordinal);
    std::fill(out.begin(), out.end(), 0.0);
    for (int w : nbr_[g]) {
      const auto p = position(w);
      for (int k = 0; k < dim(); ++k) out[k] += p[k] / 3.0;
    }
    const double nudge = 1e-6 * (scale() > 0.0 ? scale() : 1.0);
    for (int k = 0; k < dim(); ++k) {
      static constexpr double kPattern[3] = {1.0, -0.5, 0.25};
      out[k] += nudge * kPattern[(ordinal + k) % 3];
    }
  }

  std::shared_ptr<const Terminals> terms_;
  std::vector<NodeTriple> nbr_;
  std::vector<NodeTriple> nbr_edge_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<double> steiner_pos_;
  std::vector<std::vector<Triplet>> triplets_;
  TopologyVector vector_;
};

inline TopologyTree root_tree(std::span<const Point> points) { return TopologyTree(Terminals::make(points)); }

/// Copy of `tree` with one more merge applied.
inline TopologyTree merge_edge(const TopologyTree& tree, int t) {
  TopologyTree out = tree;
  out.merge_edge(t);
  return out;
}

inline TopologyTree build_tree(std::shared_ptr<const Terminals> terminals, const TopologyVector& topo) {
  if (!topo.valid()) throw Error(ErrorCode::InvalidTopology, "topology '" + topo.to_string() + "' is not valid");
  TopologyTree tree(std::move(terminals));
  for (int t : topo.entries()) tree.merge_edge(t);
  return tree;
}

inline TopologyTree build_tree(std::span<const Point> points, const TopologyVector& topo) {
  return build_tree(Terminals::make(points), topo);
}

/// (2N-5)!!, the number of full topologies on N regular points.
inline std::uint64_t count_full_topologies(int n) {
  if (n < 3) throw Error(ErrorCode::TooFewPoints, "N must be at least 3");
  std::uint64_t count = 1;
  for (std::uint64_t f = 3; f <= static_cast<std::uint64_t>(2 * n - 5); f += 2) {
    if (count > UINT64_MAX / f) throw Error(ErrorCode::InvalidArgument, "topology count overflows 64 bits");
    count *= f;
  }
  return count;
}

/// Children (= edges) of a branch-and-bound node at the given level.
inline int child_count(int level) { return 2 * level + 1; }

/// Recovers the unique topology vector whose tree has the given edge splits.
/// `splits` holds, for every edge, the mask of the side not containing regular 0.
inline TopologyVector decode_topology(std::shared_ptr<const Terminals> terminals, std::span<const SplitMask> splits,
                                      int regular_inserted) {
  TopologyTree tree(std::move(terminals));
  for (int m = 3; m < regular_inserted; ++m) {
    const SplitMask keep = (m + 1 >= 64) ? ~SplitMask{0} : ((SplitMask{1} << (m + 1)) - 1);
    std::unordered_set<SplitMask> restricted;
    for (SplitMask s : splits) {
      const SplitMask r = s & keep;
      if (r != 0) restricted.insert(r);
    }
    const auto mask = tree.subtree_masks();
    const SplitMask bit_m = SplitMask{1} << m;
    int chosen = 0;
    for (int e = 1; e <= tree.edge_count(); ++e) {
      const auto ends = tree.edge(e);
      // The endpoint farther from regular 0 carries the edge's split.
      const SplitMask a = std::min(mask[ends[0]], mask[ends[1]]);
      if (restricted.count(a) && restricted.count(a | bit_m)) {
        chosen = e;
        break;
      }
    }
    if (chosen == 0) throw Error(ErrorCode::InvalidTopology, "split set does not describe a full topology");
    tree.merge_edge(chosen);
  }
  return tree.vector();
}

struct Reorganization {
  TopologyVector vector;
  TopologyTree tree;
};

namespace detail {

inline void swap_neighbor(std::vector<NodeTriple>& nbr, int node, int old_nbr, int new_nbr) {
  for (int& w : nbr[node]) {
    if (w == old_nbr) {
      w = new_nbr;
      return;
    }
  }
}

}  // namespace detail

/// The two topologies reachable when S_i and S_h (i > h, adjacent) collide: S_i
/// keeps the branch towards its own regular point and trades its other branch
/// for one of S_h's two remaining branches. The first entry corresponds to the
/// triplet's e1, the second to e2. Trees carry the collided positions.
inline std::array<Reorganization, 2> reorganize(const TopologyTree& tree, int i, int h) {
  if (i < h) std::swap(i, h);
  if (h < 0 || i >= tree.steiner_count() || i == h)
    throw Error(ErrorCode::InvalidArgument, "Steiner ordinals out of range");
  const int n = tree.regular_count();
  const int si = n + i;
  const int sh = n + h;
  if (!tree.adjacent(si, sh))
    throw Error(ErrorCode::NotAdjacent, "S_" + std::to_string(i) + " and S_" + std::to_string(h) + " are not adjacent");
  const auto& trips = tree.triplets(i);
  auto trip = std::find_if(trips.begin(), trips.end(), [&](const Triplet& t) { return t.steiner == sh; });
  if (trip == trips.end())
    throw Error(ErrorCode::NoTriplet, "S_" + std::to_string(i) + " holds no triplet for S_" + std::to_string(h));

  // S_i's branch towards its regular point i + 2; S_h is never on it since h < i.
  const auto& base_nbr = tree.adjacency();
  int r_side = TopologyTree::kNone;
  {
    std::vector<int> toward_si(base_nbr.size(), -2);
    std::vector<int> stack{si};
    toward_si[si] = -1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int w : base_nbr[v]) {
        if (w == TopologyTree::kNone || toward_si[w] != -2) continue;
        toward_si[w] = v;
        stack.push_back(w);
      }
    }
    int cur = i + 2;
    while (toward_si[cur] != si) cur = toward_si[cur];
    r_side = cur;
  }
  int y = TopologyTree::kNone;
  for (int w : base_nbr[si])
    if (w != sh && w != r_side) y = w;
  std::array<int, 2> branches{};
  int c = 0;
  for (int w : base_nbr[sh])
    if (w != si) branches[c++] = w;

  std::vector<Reorganization> results;
  for (int x : branches) {
    std::vector<NodeTriple> nbr = base_nbr;
    detail::swap_neighbor(nbr, si, y, x);
    detail::swap_neighbor(nbr, sh, x, y);
    detail::swap_neighbor(nbr, y, si, sh);
    detail::swap_neighbor(nbr, x, sh, si);

    std::vector<int> par;
    const auto mask = detail::subtree_masks(nbr, n, &par);
    std::vector<SplitMask> splits;
    for (int v = 1; v < static_cast<int>(nbr.size()); ++v)
      if (tree.active(v)) splits.push_back(mask[v]);
    TopologyVector vec = decode_topology(tree.terminals(), splits, tree.inserted_regular_count());
    TopologyTree rebuilt = build_tree(tree.terminals(), vec);

    // Carry positions over by matching Steiner points through their split signatures.
    std::vector<std::pair<std::array<SplitMask, 3>, int>> old_sigs;
    for (int k = 0; k < tree.steiner_count(); ++k)
      old_sigs.emplace_back(detail::steiner_signature(n + k, nbr, mask, par), k);
    std::vector<int> new_par;
    const auto new_mask = rebuilt.subtree_masks(&new_par);
    for (int k = 0; k < rebuilt.steiner_count(); ++k) {
      const auto sig = detail::steiner_signature(n + k, rebuilt.adjacency(), new_mask, new_par);
      auto it = std::find_if(old_sigs.begin(), old_sigs.end(), [&](const auto& e) { return e.first == sig; });
      if (it == old_sigs.end()) throw Error(ErrorCode::InvalidTopology, "reorganized tree does not match its decoding");
      auto dst = rebuilt.steiner_position(k);
      auto src = tree.steiner_position(it->second);
      std::copy(src.begin(), src.end(), dst.begin());
    }
    results.push_back(Reorganization{std::move(vec), std::move(rebuilt)});
  }

  const int ti0 = results[0].vector[static_cast<std::size_t>(i - 1)];
  const int ti1 = results[1].vector[static_cast<std::size_t>(i - 1)];
  const bool ok = (ti0 == trip->e1 && ti1 == trip->e2) || (ti0 == trip->e2 && ti1 == trip->e1);
  if (!ok) throw Error(ErrorCode::InvalidTopology, "reorganized t_i does not match the triplet record");
  if (ti0 == trip->e2) std::swap(results[0], results[1]);
  return {std::move(results[0]), std::move(results[1])};
}

inline std::pair<TopologyVector, TopologyVector> reorganizations(const TopologyTree& tree, int i, int h) {
  auto r = reorganize(tree, i, h);
  return {std::move(r[0].vector), std::move(r[1].vector)};
}

}  // namespace steiner

#endif  // STEINER_TOPOLOGY_HPP
