// Copyright 2026 The shapegraph Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ssg/commands.hpp"

#include <omp.h>

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <utility>

#include <CLI11.hpp>

#include "binary_io.hpp"
#include "ssg/path_export.hpp"

namespace ssg {

namespace fs = std::filesystem;

int exit_code_for(const std::exception& e) {
  if (const auto* p = dynamic_cast<const PlanningError*>(&e)) {
    return p->kind() == PlanningError::Kind::Unreachable ? kExitUnreachable : kExitPrunedEndpoint;
  }
  if (dynamic_cast<const NoAliveNodeError*>(&e)) return kExitPrunedEndpoint;
  if (dynamic_cast<const LibraryFormatError*>(&e) || dynamic_cast<const GraphFormatError*>(&e) ||
      dynamic_cast<const IoError*>(&e) || dynamic_cast<const fs::filesystem_error*>(&e)) {
    return kExitIo;
  }
  return kExitConfig;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<std::byte> read_or_throw_library(const fs::path& p) {
  std::vector<std::byte> bytes;
  if (!io::read_file(p.string(), bytes)) {
    throw LibraryFormatError(LibraryFormatError::Kind::Io, "library: cannot read " + p.string());
  }
  return bytes;
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

fs::path suffixed(const fs::path& p, const std::string& suffix) {
  return p.parent_path() / (p.stem().string() + suffix + p.extension().string());
}

Digest prune_key(const Scenario& s, const Digest& graph_digest) {
  io::Writer w;
  w.tag("PRNE");
  w.bytes(graph_digest.data(), graph_digest.size());
  w.f64(s.rho_tube);
  w.u64(s.sweep_steps);
  w.f64(s.clearance_margin);
  const std::string obstacles = s.obstacles_json.dump();
  w.u64(obstacles.size());
  w.bytes(obstacles.data(), obstacles.size());
  return sha256(w.buffer());
}

bool load_prune_cache(const fs::path& p, const Digest& key, ShapeGraph& graph) {
  std::vector<std::byte> bytes;
  if (!io::read_file(p.string(), bytes)) return false;
  io::Reader r(bytes);
  const std::size_t n = graph.node_count(), m = graph.edge_count();
  if (r.remaining() != 4 + 32 + 16 + n + m) return false;
  if (!r.tag_equals("SSGP")) return false;
  Digest stored{};
  r.bytes(stored.data(), stored.size());
  if (stored != key || r.u64() != n || r.u64() != m) return false;
  std::vector<std::uint8_t> nodes(n), edges(m);
  r.bytes(nodes.data(), n);
  r.bytes(edges.data(), m);
  graph.set_alive_masks(std::move(nodes), std::move(edges));
  return true;
}

void store_prune_cache(const fs::path& p, const Digest& key, const ShapeGraph& graph) {
  io::Writer w;
  w.tag("SSGP");
  w.bytes(key.data(), key.size());
  w.u64(graph.node_count());
  w.u64(graph.edge_count());
  w.bytes(graph.node_alive_mask().data(), graph.node_count());
  w.bytes(graph.edge_alive_mask().data(), graph.edge_count());
  ensure_parent(p);
  if (!io::write_file(p.string(), w.buffer())) throw IoError("cannot write prune cache " + p.string());
}

std::string fixed(double v, int precision) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(precision) << v;
  return o.str();
}

std::string percent_delta(double base, double value) {
  if (base == 0.0) return "n/a";
  const double d = (value - base) / std::abs(base) * 100.0;
  std::ostringstream o;
  o << (d >= 0 ? "+" : "") << std::fixed << std::setprecision(2) << d << " %";
  return o.str();
}

}  // namespace

GenLibResult cmd_gen_lib(const Scenario& s, std::ostream& log) {
  const auto t0 = Clock::now();
  FilamentShapeSource source(s.library.map, s.library.length);
  ShapeLibrary lib = generate_library(source, s.library.n, s.library.n_z, s.library.seed);
  GenLibResult res;
  res.path = s.resolve(s.library.path);
  ensure_parent(res.path);
  save_library(lib, res.path.string());
  res.digest = library_digest(lib);
  res.n = lib.size();
  res.seconds = seconds_since(t0);
  log << "gen-lib: N=" << lib.size() << " n_z=" << lib.n_z() << " L=" << lib.length() << " seed=" << s.library.seed
      << " wall=" << fixed(res.seconds, 3) << " s\n"
      << "gen-lib: wrote " << res.path.string() << " sha256=" << to_hex(res.digest) << "\n";
  return res;
}

BuildGraphResult cmd_build_graph(const Scenario& s, std::ostream& log) {
  const auto t0 = Clock::now();
  const fs::path lib_path = s.resolve(s.library.path);
  const auto bytes = read_or_throw_library(lib_path);
  const ShapeLibrary lib = deserialize_library(bytes, s.library.n_z);
  if (s.graph.k >= lib.size()) {
    throw ConfigError("graph.k", "must be < N (k=" + std::to_string(s.graph.k) + ", N=" + std::to_string(lib.size()) + ")");
  }
  const Digest lib_digest = sha256(bytes);
  const ShapeGraph graph = build_knn_graph(lib, s.graph.k, lib_digest);
  BuildGraphResult res;
  res.path = s.resolve(s.graph.path);
  ensure_parent(res.path);
  const auto graph_bytes = serialize_graph(graph);
  if (!io::write_file(res.path.string(), graph_bytes)) {
    throw GraphFormatError(GraphFormatError::Kind::Io, "graph: cannot write " + res.path.string());
  }
  res.digest = sha256(graph_bytes);
  res.edges = graph.edge_count();
  res.seconds = seconds_since(t0);
  log << "build-graph: N=" << lib.size() << " k=" << s.graph.k << " edges=" << res.edges
      << " wall=" << fixed(res.seconds, 3) << " s\n"
      << "build-graph: library sha256=" << to_hex(lib_digest) << "\n"
      << "build-graph: wrote " << res.path.string() << " sha256=" << to_hex(res.digest) << "\n";
  return res;
}

PreparedGraph prepare_graph(const Scenario& s, std::ostream& log) {
  const fs::path lib_path = s.resolve(s.library.path);
  const fs::path graph_path = s.resolve(s.graph.path);
  const auto lib_bytes = read_or_throw_library(lib_path);
  std::vector<std::byte> graph_bytes;
  if (!io::read_file(graph_path.string(), graph_bytes)) {
    throw GraphFormatError(GraphFormatError::Kind::Io, "graph: cannot read " + graph_path.string());
  }

  PreparedGraph p{deserialize_library(lib_bytes, s.library.n_z), deserialize_graph(graph_bytes)};
  p.library_digest = sha256(lib_bytes);
  p.graph_digest = sha256(graph_bytes);
  if (p.graph.library_digest() != p.library_digest || p.graph.node_count() != p.library.size()) {
    throw GraphFormatError(GraphFormatError::Kind::DigestMismatch,
                           "graph " + graph_path.string() + " was built from a different library (graph records " +
                               to_hex(p.graph.library_digest()) + ", library is " + to_hex(p.library_digest) + ")");
  }
  if (p.library.meta().map_digest != s.library.map.digest()) {
    throw ConfigError("library.actuation", "does not match the actuation map recorded in " + lib_path.string());
  }

  p.prune_key = prune_key(s, p.graph_digest);
  const fs::path cache = s.out_dir / ".ssg-cache" / ("prune-" + to_hex(p.prune_key).substr(0, 16) + ".bin");
  if (s.output.prune_cache && load_prune_cache(cache, p.prune_key, p.graph)) {
    p.cache_hit = true;
  } else {
    prune_nodes(p.graph, p.library, s.obstacles, s.rho_tube, s.clearance_margin);
    p.edges_swept_out = sweep_edges(p.graph, p.library, s.obstacles, s.rho_tube, s.sweep_steps, s.clearance_margin);
    if (s.output.prune_cache) store_prune_cache(cache, p.prune_key, p.graph);
  }
  log << "prune: key=" << to_hex(p.prune_key).substr(0, 16) << " cache=" << (p.cache_hit ? "hit" : "miss")
      << " graph=" << to_hex(p.graph_digest).substr(0, 16) << " alive_nodes=" << p.graph.alive_node_count() << "/"
      << p.graph.node_count() << " alive_edges=" << p.graph.alive_edge_count() << "/" << p.graph.edge_count() << "\n";
  return p;
}

PlanOutcome plan_with(const Scenario& s, const PreparedGraph& prepared, const CostWeights& weights,
                      const std::string& label) {
  if (!s.start) throw ConfigError("start", "missing");
  if (!s.goal) throw ConfigError("goal", "missing");
  const auto& lib = prepared.library;
  const RouteTarget start = to_route_target(*s.start, s.library, lib.n_z(), lib.length());
  const RouteTarget goal = to_route_target(*s.goal, s.library, lib.n_z(), lib.length());
  std::vector<RouteTarget> waypoints;
  for (const auto& w : s.waypoints) waypoints.push_back(to_route_target(w, s.library, lib.n_z(), lib.length()));

  PlanOutcome out;
  out.label = label;
  out.weights = weights;
  const auto w = edge_weights(prepared.graph, lib, weights);
  out.path = plan_route(prepared.graph, w, lib, start, waypoints, goal, RouteOptions{s.snap_tolerance});
  out.metrics = compute_metrics(out.path, lib);
  return out;
}

PlanOutcome cmd_plan(const Scenario& s, std::ostream& log) {
  const PreparedGraph prepared = prepare_graph(s, log);
  PlanOutcome out = plan_with(s, prepared, s.costs, s.name);
  const fs::path json_path = s.resolve(s.output.path_json);
  const fs::path csv_path = s.resolve(s.output.path_csv);
  ensure_parent(json_path);
  ensure_parent(csv_path);
  write_text_file(json_path.string(), path_to_json(out.path, out.metrics, out.weights, s.name).dump(1) + "\n");
  write_text_file(csv_path.string(), path_to_csv(out.path));
  log << "plan: " << format_metrics_row(out.metrics) << "\n"
      << "plan: wrote " << json_path.string() << " and " << csv_path.string() << "\n";
  return out;
}

std::vector<PlanOutcome> cmd_compare(const Scenario& s, std::ostream& log) {
  const PreparedGraph prepared = prepare_graph(s, log);
  std::vector<PlanOutcome> outcomes;
  for (std::size_t t = 0; t < s.compare.size(); ++t) {
    PlanOutcome out = plan_with(s, prepared, s.compare[t].weights, s.compare[t].name);
    const fs::path json_path = suffixed(s.resolve(s.output.path_json), "_" + std::to_string(t));
    const fs::path csv_path = suffixed(s.resolve(s.output.path_csv), "_" + std::to_string(t));
    ensure_parent(json_path);
    write_text_file(json_path.string(),
                    path_to_json(out.path, out.metrics, out.weights, s.name + ":" + out.label).dump(1) + "\n");
    write_text_file(csv_path.string(), path_to_csv(out.path));
    outcomes.push_back(std::move(out));
  }
  log << format_comparison_table(outcomes);
  return outcomes;
}

std::string format_metrics_row(const PathMetrics& m) {
  std::ostringstream o;
  o << "n_nodes=" << m.node_count << " L_tip=" << fixed(m.tip_length, 3) << " m E_gamma=" << fixed(m.energy, 2)
    << " TV_gamma=" << fixed(m.smoothness, 2) << " search=" << fixed(m.search_time, 3) << " s";
  return o.str();
}

std::string format_comparison_table(const std::vector<PlanOutcome>& outcomes) {
  struct Row {
    const char* label;
    double (*get)(const PathMetrics&);
    int precision;
  };
  static const Row rows[] = {
      {"n_nodes", [](const PathMetrics& m) { return static_cast<double>(m.node_count); }, 0},
      {"L_tip [m]", [](const PathMetrics& m) { return m.tip_length; }, 3},
      {"E_gamma", [](const PathMetrics& m) { return m.energy; }, 2},
      {"TV_gamma", [](const PathMetrics& m) { return m.smoothness; }, 2},
      {"Search [s]", [](const PathMetrics& m) { return m.search_time; }, 3},
  };
  constexpr int kLabel = 12, kCol = 16;
  std::ostringstream o;
  o << std::left << std::setw(kLabel) << "";
  for (const auto& out : outcomes) o << std::setw(kCol) << out.label;
  for (std::size_t t = 1; t < outcomes.size(); ++t) o << std::setw(kCol) << ("delta " + std::to_string(t));
  o << "\n";
  for (const Row& r : rows) {
    o << std::setw(kLabel) << r.label;
    for (const auto& out : outcomes) o << std::setw(kCol) << fixed(r.get(out.metrics), r.precision);
    for (std::size_t t = 1; t < outcomes.size(); ++t) {
      o << std::setw(kCol) << percent_delta(r.get(outcomes[0].metrics), r.get(outcomes[t].metrics));
    }
    o << "\n";
  }
  return o.str();
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Shape-space graph planner for a three-fiber soft arm"};
  app.require_subcommand(1);
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> threads;
  const std::pair<const char*, const char*> subcommands[] = {
      {"gen-lib", "Sample activations and write the shape library"},
      {"build-graph", "Build the exact k-NN graph over the library"},
      {"plan", "Prune for obstacles and plan one route"},
      {"compare", "Plan the same route under several cost weightings"}};
  for (const auto& [name, help] : subcommands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "Scenario JSON")->required();
    sub->add_option("--seed", seed, "Override library.seed");
    sub->add_option("--out-dir", out_dir, "Directory for relative paths and outputs");
    sub->add_option("--threads", threads, "Worker threads (default: $SSG_THREADS or all cores)")->check(CLI::PositiveNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    Scenario s = load_scenario(config);
    if (seed) s.library.seed = *seed;
    if (out_dir) s.out_dir = *out_dir;
    int nthreads = threads.value_or(s.threads);
    if (nthreads <= 0) {
      if (const char* env = std::getenv("SSG_THREADS"); env && *env) nthreads = std::atoi(env);
    }
    if (nthreads > 0) omp_set_num_threads(nthreads);
    fs::create_directories(s.out_dir);

    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "gen-lib") cmd_gen_lib(s, out);
    else if (cmd == "build-graph") cmd_build_graph(s, out);
    else if (cmd == "plan") cmd_plan(s, out);
    else cmd_compare(s, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kExitOk;
}

}  // namespace ssg
