#ifndef STEINER_APP_HPP
#define STEINER_APP_HPP

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "steiner/engine.hpp"
#include "steiner/instance.hpp"
#include "steiner/report.hpp"
#include "steiner/svg.hpp"

namespace steiner {

struct ReferenceCounts {
  std::int64_t original, enhanced, reorganizations;
};

/// Reference explored-topology counts for the first five corpus instances.
inline const std::map<std::string, ReferenceCounts>& reference_counts() {
  static const std::map<std::string, ReferenceCounts> table{{"paper-01", {14, 14, 1}},
                                                            {"paper-02", {14, 14, 0}},
                                                            {"paper-03", {546, 522, 54}},
                                                            {"paper-04", {11441, 11434, 493}},
                                                            {"paper-05", {146598, 145840, 7336}}};
  return table;
}

/// Reference mean enhanced/original topology ratios at N = 8.
inline std::optional<double> reference_ratio(int n, int dim) {
  if (n == 8 && dim == 2) return 0.7261;
  if (n == 8 && dim == 3) return 0.8565;
  return std::nullopt;
}

inline Instance load_instance(const std::string& source) {
  constexpr std::string_view prefix = "builtin:";
  if (source.rfind(prefix, 0) == 0) return builtin_instance(source.substr(prefix.size()));
  std::ifstream in(source);
  if (!in) {
    for (auto& inst : builtin_instances())
      if (inst.name == source) return inst;
    throw Error(ErrorCode::IoError, "cannot read " + source);
  }
  std::stringstream text;
  text << in.rdbuf();
  return parse_instance(text.str(), std::filesystem::path(source).stem().string());
}

struct BenchRow {
  std::string name;
  int n = 0, dim = 0;
  SearchStats original, enhanced;
  double length_gap = 0.0;
  double topology_ratio() const {
    return original.lower_bounds_computed > 0
               ? static_cast<double>(enhanced.lower_bounds_computed) / static_cast<double>(original.lower_bounds_computed)
               : 1.0;
  }
  double time_ratio() const { return original.wall_time > 0 ? enhanced.wall_time / original.wall_time : 1.0; }
};

inline BenchRow bench_instance(const Instance& inst, const SearchOptions& opts) {
  BenchRow row{inst.name, static_cast<int>(inst.points.size()), inst.dim, {}, {}, 0.0};
  auto a = solve_original(inst.points, opts);
  auto b = solve_enhanced(inst.points, opts);
  row.original = a.stats;
  row.enhanced = b.stats;
  row.length_gap = std::abs(a.solution.length - b.solution.length) / a.solution.length;
  return row;
}

struct BenchSummary {
  std::vector<BenchRow> rows;
  double mean_topology_ratio = 0.0;
  double mean_time_ratio = 0.0;
  double max_length_gap = 0.0;
};

inline BenchSummary summarize(std::vector<BenchRow> rows) {
  BenchSummary s;
  for (const auto& r : rows) {
    s.mean_topology_ratio += r.topology_ratio();
    s.mean_time_ratio += r.time_ratio();
    s.max_length_gap = std::max(s.max_length_gap, r.length_gap);
  }
  if (!rows.empty()) {
    s.mean_topology_ratio /= static_cast<double>(rows.size());
    s.mean_time_ratio /= static_cast<double>(rows.size());
  }
  s.rows = std::move(rows);
  return s;
}

inline nlohmann::json to_json(const BenchSummary& s) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : s.rows) {
    nlohmann::json row{{"instance", r.name},
                       {"n", r.n},
                       {"dim", r.dim},
                       {"original", to_json(r.original)},
                       {"enhanced", to_json(r.enhanced)},
                       {"topology_ratio", r.topology_ratio()},
                       {"time_ratio", r.time_ratio()},
                       {"length_gap", r.length_gap}};
    if (auto it = reference_counts().find(r.name); it != reference_counts().end())
      row["reference"] = {{"original", it->second.original},
                          {"enhanced", it->second.enhanced},
                          {"reorganizations", it->second.reorganizations}};
    rows.push_back(row);
  }
  return {{"rows", rows},
          {"mean_topology_ratio", s.mean_topology_ratio},
          {"mean_time_ratio", s.mean_time_ratio},
          {"max_length_gap", s.max_length_gap}};
}

inline void print_bench(const BenchSummary& s, std::ostream& out) {
  out << std::left << std::setw(22) << "instance" << std::right << std::setw(4) << "N" << std::setw(3) << "d"
      << std::setw(12) << "orig lb" << std::setw(12) << "enh lb" << std::setw(8) << "reorg" << std::setw(9) << "ratio"
      << std::setw(9) << "cpu" << "  reference\n";
  for (const auto& r : s.rows) {
    out << std::left << std::setw(22) << r.name << std::right << std::setw(4) << r.n << std::setw(3) << r.dim
        << std::setw(12) << r.original.lower_bounds_computed << std::setw(12) << r.enhanced.lower_bounds_computed
        << std::setw(8) << r.enhanced.reorganizations_taken << std::setw(9) << std::fixed << std::setprecision(4)
        << r.topology_ratio() << std::setw(9) << r.time_ratio() << std::defaultfloat;
    if (auto it = reference_counts().find(r.name); it != reference_counts().end())
      out << "  " << it->second.original << "/" << it->second.enhanced << "/" << it->second.reorganizations;
    out << "\n";
  }
  out << std::fixed << std::setprecision(4) << "mean topology ratio " << s.mean_topology_ratio << ", mean cpu ratio "
      << s.mean_time_ratio << std::defaultfloat << ", max length gap " << s.max_length_gap << "\n";
}

inline void print_solution(const RunReport& r, std::ostream& out) {
  out << std::setprecision(15) << r.instance << " [" << r.scheme << "] length " << r.length << " topology "
      << (r.topology.empty() ? "-" : r.topology) << "\n";
  const auto& s = r.stats;
  out << "  built " << s.topologies_built << ", optimized " << s.optimizations << ", lower bounds "
      << s.lower_bounds_computed << ", reorganizations " << s.reorganizations_taken << ", cut " << s.nodes_cut
      << ", first leaf after " << s.steps_to_first_leaf << ", " << std::setprecision(3) << s.wall_time << " s\n";
  if (!r.degenerate_pairs.empty()) {
    out << "  degenerate:";
    for (const auto& p : r.degenerate_pairs) out << " (" << p[0] << "," << p[1] << ")";
    out << "\n";
  }
}

/// Runs the command line; returns the process exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Exact Euclidean Steiner minimal trees by branch and bound"};
  app.require_subcommand(1);

  SearchOptions opts;
  std::string input, scheme = "enhanced", json_path, svg_path;
  bool no_lower_bound = false;
  auto* solve = app.add_subcommand("solve", "Solve one instance");
  solve->add_option("input", input, "Instance file or builtin:NAME")->required();
  solve->add_option("--scheme", scheme, "original or enhanced")->check(CLI::IsMember({"original", "enhanced"}));
  solve->add_flag("--no-lower-bound", no_lower_bound, "Disable lower-bound pruning");
  solve->add_flag("--twin-prune", opts.twin_prune, "Cut crossing twins of pruned 2D trees");
  solve->add_flag("--error-figure-pruning", opts.error_figure_pruning, "Diagnostics: prune with L - E < L*");
  solve->add_option("--collision-eps", opts.optimize.collision_eps, "Collision radius, fraction of the diameter");
  solve->add_option("--conv-eps", opts.optimize.conv_eps, "Convergence threshold on E / L");
  solve->add_option("--max-iters", opts.optimize.max_iters, "Iteration limit per optimization");
  solve->add_option("--json", json_path, "Write the report here");
  solve->add_option("--svg", svg_path, "Write a plot here");

  bool count_only = false;
  auto* enumerate = app.add_subcommand("enumerate", "Visit every full topology");
  enumerate->add_option("input", input, "Instance file or builtin:NAME")->required();
  enumerate->add_flag("--count-only", count_only, "Only count the topologies");
  enumerate->add_option("--cap", opts.enumerate_cap, "Largest N accepted");

  std::string dir;
  std::vector<int> random_spec;
  std::uint64_t seed = 1;
  auto* bench = app.add_subcommand("bench", "Compare both schemes");
  bench->add_option("dir", dir, "Directory of instance files");
  bench->add_option("--random", random_spec, "N D COUNT")->expected(3);
  bench->add_option("--seed", seed, "Seed for --random");
  bench->add_option("--json", json_path, "Write the comparison here");

  bool list = false;
  std::string dump;
  auto* instances = app.add_subcommand("instances", "Built-in corpus");
  auto* list_flag = instances->add_flag("--list", list, "List names");
  instances->add_option("--dump", dump, "Print one instance")->excludes(list_flag);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*solve) {
      opts.lower_bound = !no_lower_bound;
      opts.validate();
      const Instance inst = load_instance(input);
      auto result = scheme == "original" ? solve_original(inst.points, opts) : solve_enhanced(inst.points, opts);
      const RunReport report = make_report(inst.name, scheme, result, opts);
      if (json_path.empty()) {
        out << to_json(report).dump(2) << "\n";
      } else {
        write_json(to_json(report), json_path);
        print_solution(report, out);
      }
      if (!svg_path.empty()) emit_svg(result.solution, svg_path);
    } else if (*enumerate) {
      const Instance inst = load_instance(input);
      auto result = enumerate_all(inst.points, opts, count_only);
      out << inst.name << ": " << result.leaves << " full topologies";
      if (!count_only)
        out << std::setprecision(15) << ", minimum " << result.solution.length << " topology "
            << result.solution.vector.to_string();
      out << "\n";
    } else if (*bench) {
      std::vector<Instance> batch;
      if (!random_spec.empty()) {
        if (!dir.empty()) throw Error(ErrorCode::InvalidArgument, "give either a directory or --random");
        if (random_spec[2] < 1) throw Error(ErrorCode::InvalidArgument, "COUNT must be positive");
        for (int i = 0; i < random_spec[2]; ++i)
          batch.push_back(random_instance(random_spec[0], random_spec[1], seed + static_cast<std::uint64_t>(i)));
      } else {
        if (dir.empty()) throw Error(ErrorCode::InvalidArgument, "give a directory or --random N D COUNT");
        std::vector<std::filesystem::path> files;
        std::error_code ec;
        for (const auto& entry : std::filesystem::directory_iterator(dir, ec))
          if (entry.is_regular_file()) files.push_back(entry.path());
        if (ec) throw Error(ErrorCode::IoError, "cannot read directory " + dir);
        std::sort(files.begin(), files.end());
        for (const auto& f : files) batch.push_back(load_instance(f.string()));
        if (batch.empty()) throw Error(ErrorCode::InvalidArgument, "no instances in " + dir);
      }
      std::vector<BenchRow> rows;
      for (const auto& inst : batch) rows.push_back(bench_instance(inst, opts));
      const BenchSummary summary = summarize(std::move(rows));
      print_bench(summary, out);
      if (!random_spec.empty()) {
        if (auto ref = reference_ratio(random_spec[0], random_spec[1]))
          out << "reference mean ratio at this size: " << *ref << "\n";
      }
      if (!json_path.empty()) write_json(to_json(summary), json_path);
    } else if (*instances) {
      if (!dump.empty()) {
        out << format_instance(builtin_instance(dump));
      } else {
        for (const auto& inst : builtin_instances())
          out << inst.name << "  N=" << inst.points.size() << " d=" << inst.dim << "\n";
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace steiner

#endif  // STEINER_APP_HPP
