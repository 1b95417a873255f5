#ifndef STEINER_GEOMETRY_HPP
#define STEINER_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

#include "steiner/error.hpp"

namespace steiner {

using ConstCoords = std::span<const double>;
using MutCoords = std::span<double>;

/// A point in d-space. Regular points of an instance all share one dimension.
class Point {
 public:
  Point() = default;
  explicit Point(std::size_t dim) : coords_(dim, 0.0) {}
  explicit Point(std::vector<double> coords) : coords_(std::move(coords)) {}
  Point(std::initializer_list<double> coords) : coords_(coords) {}
  explicit Point(ConstCoords coords) : coords_(coords.begin(), coords.end()) {}

  std::size_t dim() const noexcept { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  double& operator[](std::size_t i) { return coords_[i]; }

  const std::vector<double>& coords() const noexcept { return coords_; }
  ConstCoords view() const noexcept { return coords_; }
  MutCoords view() noexcept { return coords_; }
  operator ConstCoords() const noexcept { return coords_; }  // NOLINT

  bool finite() const {
    return std::all_of(coords_.begin(), coords_.end(), [](double c) { return std::isfinite(c); });
  }

  friend bool operator==(const Point&, const Point&) = default;

 private:
  std::vector<double> coords_;
};

inline double dot(ConstCoords a, ConstCoords b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

inline double squared_distance(ConstCoords a, ConstCoords b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    s += diff * diff;
  }
  return s;
}

inline double distance(ConstCoords a, ConstCoords b) { return std::sqrt(squared_distance(a, b)); }

inline double norm(ConstCoords a) { return std::sqrt(dot(a, a)); }

inline Point operator-(const Point& a, const Point& b) {
  Point out(a.dim());
  for (std::size_t k = 0; k < a.dim(); ++k) out[k] = a[k] - b[k];
  return out;
}

inline Point operator+(const Point& a, const Point& b) {
  Point out(a.dim());
  for (std::size_t k = 0; k < a.dim(); ++k) out[k] = a[k] + b[k];
  return out;
}

inline Point operator*(double s, const Point& a) {
  Point out(a.dim());
  for (std::size_t k = 0; k < a.dim(); ++k) out[k] = s * a[k];
  return out;
}

/// True when the angle at `apex` between rays to `p` and `q` is at least 120 degrees.
/// Evaluated as 2(u.v) + |u||v| <= 0, so a zero-length ray also counts as wide.
inline bool wide_angle(ConstCoords apex, ConstCoords p, ConstCoords q) {
  double uv = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t k = 0; k < apex.size(); ++k) {
    const double u = p[k] - apex[k];
    const double v = q[k] - apex[k];
    uv += u * v;
    uu += u * u;
    vv += v * v;
  }
  return 2.0 * uv + std::sqrt(uu * vv) <= 0.0;
}

/// Relative threshold on D / (|a||b|) below which a cherry is treated as collinear.
inline constexpr double kDegeneracyEps = 1e-12;

/// Planar equilateral point of the pair (x1, x2) inside the plane through x1, x2, x3.
struct EquilateralConstruction {
  Point a;  // x2 - x1
  Point b;  // x3 - x1
  double r = 0.0;
  double t = 0.0;
  double D = 0.0;
  Point e;
};

namespace detail {

// Writes the equilateral point farthest from x3 into `out`. Returns false when
// a and b are (numerically) linearly dependent.
inline bool equilateral_into(ConstCoords x1, ConstCoords x2, ConstCoords x3, MutCoords out,
                             double* r_out = nullptr, double* t_out = nullptr,
                             double* d_out = nullptr) {
  const std::size_t dim = x1.size();
  double aa = 0.0, bb = 0.0, ab = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    const double a = x2[k] - x1[k];
    const double b = x3[k] - x1[k];
    aa += a * a;
    bb += b * b;
    ab += a * b;
  }
  const double D = std::sqrt(std::max(0.0, aa * bb - ab * ab));
  if (d_out) *d_out = D;
  if (!(D > kDegeneracyEps * std::sqrt(aa * bb))) return false;

  static const double kHalfSqrt3 = std::sqrt(3.0) / 2.0;
  // Of the two solutions (r+, t-) and (r-, t+), the first lies opposite x3.
  const double r = 0.5 + kHalfSqrt3 * ab / D;
  const double t = -kHalfSqrt3 * aa / D;
  if (r_out) *r_out = r;
  if (t_out) *t_out = t;

  // Same point written as midpoint - (sqrt3/2)|a| n/|n|, n the part of b
  // normal to a; stays equilateral when b is nearly parallel to a.
  double n2 = 0.0, na = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    const double a_k = x2[k] - x1[k];
    out[k] = (x3[k] - x1[k]) - (ab / aa) * a_k;
  }
  for (std::size_t k = 0; k < dim; ++k) na += out[k] * (x2[k] - x1[k]);
  for (std::size_t k = 0; k < dim; ++k) {
    out[k] -= (na / aa) * (x2[k] - x1[k]);
    n2 += out[k] * out[k];
  }
  if (!(n2 > 0.0)) return false;
  const double scale = kHalfSqrt3 * std::sqrt(aa / n2);
  for (std::size_t k = 0; k < dim; ++k) out[k] = 0.5 * (x1[k] + x2[k]) - scale * out[k];
  return true;
}

}  // namespace detail

inline void require_same_dim(ConstCoords a, ConstCoords b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "points differ in dimension");
}

/// Equilateral point of (x1, x2), on the side of the segment opposite to x3.
/// Throws DegenerateCherry when x1, x2, x3 are collinear (or coincident).
inline EquilateralConstruction equilateral_point(const Point& x1, const Point& x2, const Point& x3) {
  require_same_dim(x1, x2);
  require_same_dim(x1, x3);
  EquilateralConstruction c;
  c.a = x2 - x1;
  c.b = x3 - x1;
  c.e = Point(x1.dim());
  if (!detail::equilateral_into(x1, x2, x3, c.e.view(), &c.r, &c.t, &c.D))
    throw Error(ErrorCode::DegenerateCherry, "cherry and reference point are collinear");
  return c;
}

/// Non-throwing variant used on hot paths; nullopt signals a degenerate cherry.
inline std::optional<Point> try_equilateral_point(ConstCoords x1, ConstCoords x2, ConstCoords x3) {
  Point e(x1.size());
  if (!detail::equilateral_into(x1, x2, x3, e.view())) return std::nullopt;
  return e;
}

/// Fermat (Torricelli) point of three points, written into `out`.
/// `out` may alias none of the inputs.
inline void fermat_point_into(ConstCoords x1, ConstCoords x2, ConstCoords x3, MutCoords out) {
  const std::size_t dim = x1.size();
  auto copy = [&](ConstCoords src) { std::copy(src.begin(), src.end(), out.begin()); };
  if (wide_angle(x1, x2, x3)) return copy(x1);
  if (wide_angle(x2, x1, x3)) return copy(x2);
  if (wide_angle(x3, x1, x2)) return copy(x3);

  // All angles below 120 degrees: the triangle is non-degenerate.
  if (!detail::equilateral_into(x1, x2, x3, out)) {
    // Unreachable in exact arithmetic; fall back to the centroid.
    for (std::size_t k = 0; k < dim; ++k) out[k] = (x1[k] + x2[k] + x3[k]) / 3.0;
    return;
  }
  // out holds e. s = e + t (x3 - e), c the centroid of x1, x2, e.
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    const double e = out[k];
    const double c = (x1[k] + x2[k] + e) / 3.0;
    const double w = x3[k] - e;
    num += (e - c) * w;
    den += w * w;
  }
  const double t = -2.0 * num / den;
  for (std::size_t k = 0; k < dim; ++k) out[k] = out[k] + t * (x3[k] - out[k]);

  // Slivers lose digits in the construction above; never return something worse than a vertex.
  auto cost = [&](ConstCoords p) { return distance(p, x1) + distance(p, x2) + distance(p, x3); };
  const double at_s = cost(out);
  const double c1 = distance(x1, x2) + distance(x1, x3);
  const double c2 = distance(x2, x1) + distance(x2, x3);
  const double c3 = distance(x3, x1) + distance(x3, x2);
  const double best = std::min({c1, c2, c3});
  if (!(at_s <= best)) {
    if (c1 == best) return copy(x1);
    if (c2 == best) return copy(x2);
    return copy(x3);
  }
}

inline Point fermat_point(const Point& x1, const Point& x2, const Point& x3) {
  require_same_dim(x1, x2);
  require_same_dim(x1, x3);
  Point out(x1.dim());
  fermat_point_into(x1, x2, x3, out.view());
  return out;
}

namespace detail {

inline double cross2(ConstCoords o, ConstCoords p, ConstCoords q) {
  return (p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0]);
}

inline bool on_segment2(ConstCoords p, ConstCoords q, ConstCoords r) {
  return std::min(p[0], q[0]) <= r[0] && r[0] <= std::max(p[0], q[0]) &&
         std::min(p[1], q[1]) <= r[1] && r[1] <= std::max(p[1], q[1]);
}

}  // namespace detail

/// Closed-segment intersection test in the plane; touching endpoints intersect.
inline bool segments_intersect_2d(ConstCoords a, ConstCoords b, ConstCoords c, ConstCoords d) {
  if (a.size() != 2 || b.size() != 2 || c.size() != 2 || d.size() != 2)
    throw Error(ErrorCode::DimensionMismatch, "segment intersection is defined for d = 2 only");
  using detail::cross2;
  using detail::on_segment2;
  const double d1 = cross2(c, d, a);
  const double d2 = cross2(c, d, b);
  const double d3 = cross2(a, b, c);
  const double d4 = cross2(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  if (d1 == 0 && on_segment2(c, d, a)) return true;
  if (d2 == 0 && on_segment2(c, d, b)) return true;
  if (d3 == 0 && on_segment2(a, b, c)) return true;
  if (d4 == 0 && on_segment2(a, b, d)) return true;
  return false;
}

/// Diameter of the axis-aligned bounding box of a flat coordinate array.
inline double bounding_box_diameter(ConstCoords flat, std::size_t dim) {
  if (dim == 0 || flat.empty()) return 0.0;
  std::vector<double> lo(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(dim));
  std::vector<double> hi = lo;
  for (std::size_t i = dim; i < flat.size(); i += dim) {
    for (std::size_t k = 0; k < dim; ++k) {
      lo[k] = std::min(lo[k], flat[i + k]);
      hi[k] = std::max(hi[k], flat[i + k]);
    }
  }
  return distance(lo, hi);
}

}  // namespace steiner

#endif  // STEINER_GEOMETRY_HPP
