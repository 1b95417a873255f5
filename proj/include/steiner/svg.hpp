#ifndef STEINER_SVG_HPP
#define STEINER_SVG_HPP

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>

#include "steiner/engine.hpp"

namespace steiner {

/// Plots the solved tree, projecting onto the first two coordinates.
/// Regular points are filled black, Steiner points white with a stroke.
inline std::string render_svg(const TopologyTree& tree) {
  const int n = tree.regular_count();
  const int total = n + tree.steiner_count();
  double lo[2] = {tree.position(0)[0], tree.position(0)[1]};
  double hi[2] = {lo[0], lo[1]};
  for (int v = 0; v < total; ++v) {
    for (int k = 0; k < 2; ++k) {
      lo[k] = std::min(lo[k], tree.position(v)[k]);
      hi[k] = std::max(hi[k], tree.position(v)[k]);
    }
  }
  const double span = std::max({hi[0] - lo[0], hi[1] - lo[1], 1e-12});
  const double mx = 0.05 * (hi[0] - lo[0] > 0 ? hi[0] - lo[0] : span);
  const double my = 0.05 * (hi[1] - lo[1] > 0 ? hi[1] - lo[1] : span);
  const double x0 = lo[0] - mx, y0 = lo[1] - my;
  const double w = hi[0] - lo[0] + 2 * mx, h = hi[1] - lo[1] + 2 * my;
  const double r = 0.012 * std::max(w, h);
  // SVG y grows downwards.
  auto px = [&](int v) { return tree.position(v)[0]; };
  auto py = [&](int v) { return y0 + y0 + h - tree.position(v)[1]; };

  std::ostringstream out;
  out.precision(10);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << x0 << " " << y0 << " " << w << " " << h << "\">\n";
  for (int e = 1; e <= tree.edge_count(); ++e) {
    auto ends = tree.edge(e);
    out << "  <line x1=\"" << px(ends[0]) << "\" y1=\"" << py(ends[0]) << "\" x2=\"" << px(ends[1]) << "\" y2=\""
        << py(ends[1]) << "\" stroke=\"black\" stroke-width=\"" << r / 3 << "\"/>\n";
  }
  for (int v = 0; v < total; ++v) {
    const bool regular = v < n;
    out << "  <circle cx=\"" << px(v) << "\" cy=\"" << py(v) << "\" r=\"" << r << "\" fill=\""
        << (regular ? "black" : "white") << "\" stroke=\"black\" stroke-width=\"" << r / 4 << "\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

inline void emit_svg(const Solution& solution, const std::string& path) {
  if (!solution.tree) throw Error(ErrorCode::InvalidArgument, "solution has no tree");
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << render_svg(*solution.tree);
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path);
}

}  // namespace steiner

#endif  // STEINER_SVG_HPP
