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

#pragma once

#include <exception>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ssg/planner.hpp"
#include "ssg/scenario.hpp"

namespace ssg {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitUnreachable = 2,
  kExitIo = 3,
  kExitPrunedEndpoint = 4,
};

int exit_code_for(const std::exception& e);

struct GenLibResult {
  std::filesystem::path path;
  Digest digest{};
  std::size_t n = 0;
  double seconds = 0.0;
};

struct BuildGraphResult {
  std::filesystem::path path;
  Digest digest{};
  std::size_t edges = 0;
  double seconds = 0.0;
};

// Library + graph loaded, digest-checked, and pruned for the scenario obstacles.
struct PreparedGraph {
  ShapeLibrary library;
  ShapeGraph graph;
  Digest library_digest{};
  Digest graph_digest{};
  Digest prune_key{};
  bool cache_hit = false;
  std::size_t edges_swept_out = 0;
};

struct PlanOutcome {
  std::string label;
  CostWeights weights;
  PlannedPath path;
  PathMetrics metrics;
};

GenLibResult cmd_gen_lib(const Scenario& s, std::ostream& log);
BuildGraphResult cmd_build_graph(const Scenario& s, std::ostream& log);

PreparedGraph prepare_graph(const Scenario& s, std::ostream& log);
PlanOutcome plan_with(const Scenario& s, const PreparedGraph& prepared, const CostWeights& weights,
                      const std::string& label);

// Writes path JSON + CSV to the scenario output paths and prints a metrics row.
PlanOutcome cmd_plan(const Scenario& s, std::ostream& log);
// Plans once per weight set on the same pruned graph and prints a comparison table.
std::vector<PlanOutcome> cmd_compare(const Scenario& s, std::ostream& log);

std::string format_metrics_row(const PathMetrics& m);
std::string format_comparison_table(const std::vector<PlanOutcome>& outcomes);

// Full command-line entry point: `ssg <gen-lib|build-graph|plan|compare> --config <path> ...`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ssg
