#ifndef STEINER_INSTANCE_HPP
#define STEINER_INSTANCE_HPP

#include <charconv>
#include <cstdint>
#include <iomanip>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "steiner/error.hpp"
#include "steiner/geometry.hpp"

namespace steiner {

struct Instance {
  std::string name;
  int dim = 0;
  std::vector<Point> points;
};

namespace detail {

inline double parse_number(std::string_view tok, int line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v))
    throw Error(ErrorCode::NonNumeric, "line " + std::to_string(line) + ": not a number: " + std::string(tok));
  return v;
}

}  // namespace detail

inline Instance parse_instance(std::string_view text, std::string name = "input") {
  Instance inst;
  inst.name = std::move(name);
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || line[first] == '#') continue;

    std::vector<double> coords;
    std::size_t i = first;
    while (i < line.size()) {
      std::size_t j = line.find_first_of(" \t\r", i);
      if (j == std::string_view::npos) j = line.size();
      coords.push_back(detail::parse_number(line.substr(i, j - i), line_no));
      i = line.find_first_not_of(" \t\r", j);
      if (i == std::string_view::npos) break;
    }
    if (inst.points.empty()) inst.dim = static_cast<int>(coords.size());
    else if (static_cast<int>(coords.size()) != inst.dim)
      throw Error(ErrorCode::RaggedRow, "line " + std::to_string(line_no) + ": expected " + std::to_string(inst.dim) +
                                            " coordinates, got " + std::to_string(coords.size()));
    inst.points.emplace_back(std::move(coords));
  }
  if (inst.points.size() < 3) throw Error(ErrorCode::TooFewPoints, "at least three points are required");
  if (inst.dim < 2) throw Error(ErrorCode::DimensionMismatch, "dimension must be at least 2");
  bool distinct = false;
  for (const Point& p : inst.points) distinct = distinct || !(p == inst.points.front());
  if (!distinct) throw Error(ErrorCode::AllCoincident, "all points coincide");
  return inst;
}

/// One point per line, 17 significant digits.
inline std::string format_instance(const Instance& inst) {
  std::ostringstream out;
  out << "# " << inst.name << "\n" << std::setprecision(17);
  for (const Point& p : inst.points) {
    for (std::size_t k = 0; k < p.dim(); ++k) out << (k ? " " : "") << p[k];
    out << "\n";
  }
  return out.str();
}

inline std::vector<Instance> builtin_instances() {
  const double phi = 1.6180339887;
  auto make = [](std::string name, std::vector<Point> pts) {
    Instance inst{std::move(name), static_cast<int>(pts.front().dim()), std::move(pts)};
    return inst;
  };
  std::vector<Instance> all;
  all.push_back(make("paper-01", {{1, 0, 0}, {-1, -0.5, 0}, {-0.25, 0.5, 0}, {-0.5, 0, 1}, {-0.5, 0, -1}}));
  all.push_back(make("paper-02", {{1, 1, 1, -0.4472},
                                  {1, -1, -1, -0.4472},
                                  {-1, 1, -1, -0.4472},
                                  {-1, -1, 1, -0.4472},
                                  {0, 0, 0, 1.7889}}));
  all.push_back(make("paper-03", {{-1, -1, -1},
                                  {1, -1, 1},
                                  {-0.5, 0, 1},
                                  {-0.25, 0, 0.5},
                                  {0, 0, 0},
                                  {0.25, 0, -0.5},
                                  {0.5, 0, -1}}));
  all.push_back(make("paper-04", {{1, 0, 0, 0},
                                  {-1, 0, 0, 0},
                                  {0, 1, 0, 0},
                                  {0, -1, 0, 0},
                                  {0, 0, 1, 0},
                                  {0, 0, -1, 0},
                                  {0, 0, 0, 1},
                                  {0, 0, 0, -1}}));
  all.push_back(make("paper-05", {{0, 0, 0},
                                  {-1, -1, -1},
                                  {1, -1, -1},
                                  {1, -1, 1},
                                  {-1, -1, 1},
                                  {-1, 1, -1},
                                  {1, 1, -1},
                                  {1, 1, 1},
                                  {-1, 1, 1}}));
  all.push_back(make("paper-06", {{1, 0, 0, 0},
                                  {1, 0, 0, 1},
                                  {1, 0, -1, 0},
                                  {0, -1, 1, 1},
                                  {-1, -1, -1, -1},
                                  {0, 0, 0, 0},
                                  {-1, 1, -1, 1},
                                  {0, 1, 0, 1},
                                  {0, 0, 0, 1},
                                  {0, 1, 1, 0}}));
  all.push_back(make("paper-07", {{0, 0, 0, 0},
                                  {-1, 0, -3, 1.6},
                                  {-1, -3, -1, 1.2},
                                  {-1, -2, 2, 0.8},
                                  {-1, 2, 2, 0.4},
                                  {-1, 3, 2, 0},
                                  {1, 0, -3, 0},
                                  {1, -3, -1, 0.4},
                                  {1, -2, 2, 0.8},
                                  {1, 2, 2, 1.2},
                                  {1, 3, 2, 1.6}}));
  all.push_back(make("paper-08", {{-1, -1, -1},
                                  {-0.5, -1, -1},
                                  {0, -1, -1},
                                  {0.5, -1, -1},
                                  {1, -1, -1},
                                  {-1, 1, 1},
                                  {-0.5, 1, 1},
                                  {0, 1, 1},
                                  {0.5, 1, 1},
                                  {1, 1, 1},
                                  {1, 0, 0},
                                  {-1, 0, 0}}));
  all.push_back(make("paper-09", {{-1, 0, 1},
                                  {-1, -1, -1},
                                  {1, 1, -1},
                                  {0, -2, 2},
                                  {0, 2, 2},
                                  {0, -2, -2},
                                  {0, 2, -2},
                                  {1, 0, -3},
                                  {1, -3, -1},
                                  {1, -2, 2},
                                  {1, 2, 2},
                                  {1, 3, -1}}));
  all.push_back(make("paper-10", {{1, 0, phi},
                                  {0, phi, 1},
                                  {phi, 1, 0},
                                  {-1, 0, phi},
                                  {0, phi, -1},
                                  {phi, -1, 0},
                                  {1, 0, -phi},
                                  {0, -phi, 1},
                                  {-phi, 1, 0},
                                  {-1, 0, -phi},
                                  {0, -phi, -1},
                                  {-phi, -1, 0}}));
  std::vector<Point> appendix{{0.61, -0.45}, {-0.83, -0.73}, {-0.85, -0.99}, {-0.44, 0.17}, {0.18, 0.43},
                              {-0.74, -0.93}, {0.09, 0.59},  {0.51, -0.87},  {-0.31, 0.70}, {0.69, 0.41}};
  all.push_back(make("appendix-a", appendix));
  std::swap(appendix.front(), appendix.back());
  all.push_back(make("appendix-a-swapped", appendix));
  return all;
}

inline Instance builtin_instance(std::string_view name) {
  for (auto& inst : builtin_instances())
    if (inst.name == name) return inst;
  throw Error(ErrorCode::InvalidArgument, "unknown builtin instance: " + std::string(name));
}

/// Uniform points in [-1, 1]^d.
inline Instance random_instance(int n, int dim, std::uint64_t seed) {
  if (n < 3) throw Error(ErrorCode::TooFewPoints, "at least three points are required");
  if (dim < 2) throw Error(ErrorCode::DimensionMismatch, "dimension must be at least 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Instance inst{"random-" + std::to_string(n) + "-" + std::to_string(dim) + "-" + std::to_string(seed), dim, {}};
  for (int i = 0; i < n; ++i) {
    Point p(static_cast<std::size_t>(dim));
    for (int k = 0; k < dim; ++k) p[k] = u(rng);
    inst.points.push_back(std::move(p));
  }
  return inst;
}

}  // namespace steiner

#endif  // STEINER_INSTANCE_HPP
