#ifndef STEINER_REPORT_HPP
#define STEINER_REPORT_HPP

#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "steiner/engine.hpp"

namespace steiner {

struct RunReport {
  std::string instance;
  std::string scheme;
  double length = 0.0;
  std::string topology;
  std::vector<std::vector<double>> steiner_points;
  std::vector<std::array<int, 2>> degenerate_pairs;
  SearchStats stats;
  SearchOptions options;
};

inline RunReport make_report(const std::string& instance, const std::string& scheme, const SearchResult& result,
                             const SearchOptions& options) {
  RunReport r;
  r.instance = instance;
  r.scheme = scheme;
  r.length = result.solution.length;
  r.topology = result.solution.vector.to_string();
  for (const Point& p : result.solution.steiner_positions) r.steiner_points.push_back(p.coords());
  r.degenerate_pairs = result.solution.degenerate_pairs;
  r.stats = result.stats;
  r.options = options;
  return r;
}

inline nlohmann::json to_json(const SearchStats& s) {
  return {{"topologies_built", s.topologies_built},
          {"optimizations", s.optimizations},
          {"lower_bounds_computed", s.lower_bounds_computed},
          {"reorganizations_taken", s.reorganizations_taken},
          {"nodes_cut", s.nodes_cut},
          {"steps_to_first_leaf", s.steps_to_first_leaf},
          {"jacobi_fallbacks", s.jacobi_fallbacks},
          {"twin_cuts", s.twin_cuts},
          {"wall_time_s", s.wall_time}};
}

inline SearchStats stats_from_json(const nlohmann::json& j) {
  SearchStats s;
  s.topologies_built = j.at("topologies_built").get<std::int64_t>();
  s.optimizations = j.at("optimizations").get<std::int64_t>();
  s.lower_bounds_computed = j.at("lower_bounds_computed").get<std::int64_t>();
  s.reorganizations_taken = j.at("reorganizations_taken").get<std::int64_t>();
  s.nodes_cut = j.at("nodes_cut").get<std::int64_t>();
  s.steps_to_first_leaf = j.at("steps_to_first_leaf").get<std::int64_t>();
  s.jacobi_fallbacks = j.value("jacobi_fallbacks", std::int64_t{0});
  s.twin_cuts = j.value("twin_cuts", std::int64_t{0});
  s.wall_time = j.at("wall_time_s").get<double>();
  return s;
}

inline nlohmann::json to_json(const RunReport& r) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : r.degenerate_pairs) pairs.push_back({p[0], p[1]});
  const auto& o = r.options;
  return {{"instance", r.instance},
          {"scheme", r.scheme},
          {"length", r.length},
          {"topology", r.topology},
          {"steiner_points", r.steiner_points},
          {"degenerate_pairs", pairs},
          {"stats", to_json(r.stats)},
          {"options",
           {{"lower_bound", o.lower_bound},
            {"twin_prune", o.twin_prune},
            {"error_figure_pruning", o.error_figure_pruning},
            {"collision_eps", o.optimize.collision_eps},
            {"conv_eps", o.optimize.conv_eps},
            {"max_iters", o.optimize.max_iters}}}};
}

inline RunReport report_from_json(const nlohmann::json& j) {
  RunReport r;
  r.instance = j.at("instance").get<std::string>();
  r.scheme = j.at("scheme").get<std::string>();
  r.length = j.at("length").get<double>();
  r.topology = j.at("topology").get<std::string>();
  r.steiner_points = j.at("steiner_points").get<std::vector<std::vector<double>>>();
  for (const auto& p : j.value("degenerate_pairs", nlohmann::json::array()))
    r.degenerate_pairs.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
  r.stats = stats_from_json(j.at("stats"));
  if (j.contains("options")) {
    const auto& o = j.at("options");
    r.options.lower_bound = o.value("lower_bound", true);
    r.options.twin_prune = o.value("twin_prune", false);
    r.options.error_figure_pruning = o.value("error_figure_pruning", false);
    r.options.optimize.collision_eps = o.value("collision_eps", 1e-4);
    r.options.optimize.conv_eps = o.value("conv_eps", 1e-10);
    r.options.optimize.max_iters = o.value("max_iters", 1000);
  }
  return r;
}

inline void write_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << j.dump(2) << "\n";
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path);
}

}  // namespace steiner

#endif  // STEINER_REPORT_HPP
