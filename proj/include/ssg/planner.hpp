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

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "ssg/costs.hpp"
#include "ssg/knn_graph.hpp"
#include "ssg/shape_library.hpp"

namespace ssg {

class PlanningError : public std::runtime_error {
 public:
  enum class Kind { Unreachable, PrunedEndpoint };
  PlanningError(Kind kind, const std::string& what, std::optional<std::size_t> leg = std::nullopt)
      : std::runtime_error(what), kind_(kind), leg_(leg) {}
  Kind kind() const { return kind_; }
  // Leg index for route planning failures.
  std::optional<std::size_t> leg() const { return leg_; }

 private:
  Kind kind_;
  std::optional<std::size_t> leg_;
};

struct SearchResult {
  std::vector<NodeId> nodes;
  double cost = 0.0;
};

// Dijkstra over alive nodes and edges with per-edge weights (indexed by EdgeId,
// all >= 0). The frontier is ordered by (cost, node index), so ties pop the
// lower index first and a node's predecessor changes only on strict improvement.
SearchResult dijkstra(const ShapeGraph& graph, std::span<const double> weights, NodeId start, NodeId goal);
SearchResult dijkstra(const ShapeGraph& graph, const CostWeights& weights, const ShapeLibrary& lib, NodeId start,
                      NodeId goal);

// Left-to-right sum of edge weights along `nodes`; throws if a step is not an alive edge.
double path_cost(const ShapeGraph& graph, std::span<const double> weights, std::span<const NodeId> nodes);

// Route targets: full shapes snap by RMS distance, tip points by Euclidean tip distance.
struct ShapeTarget {
  CenterlineShape shape;
};
struct TipTarget {
  Vec3 point;
};
using RouteTarget = std::variant<ShapeTarget, TipTarget>;

struct RouteOptions {
  // A target whose nearest alive node is farther than this is unreachable.
  double snap_tolerance = std::numeric_limits<double>::infinity();
};

struct PlannedPath {
  std::vector<NodeId> nodes;
  // Position in `nodes` of each snapped target (start, waypoints..., goal).
  std::vector<std::size_t> segment_boundaries;
  std::vector<NodeId> snapped_targets;
  std::vector<double> snap_distances;
  std::vector<double> leg_costs;
  double total_cost = 0.0;
  double search_seconds = 0.0;

  std::vector<Vec3> activations;
  std::vector<PointMatrix> shapes;
};

struct PathMetrics {
  double tip_length = 0.0;
  double energy = 0.0;
  double smoothness = 0.0;
  std::size_t node_count = 0;
  double search_time = 0.0;
};

NodeId snap_target(const ShapeLibrary& lib, const ShapeGraph& graph, const RouteTarget& target, double* distance = nullptr);

PlannedPath plan_route(const ShapeGraph& graph, std::span<const double> weights, const ShapeLibrary& lib,
                       const RouteTarget& start, std::span<const RouteTarget> waypoints, const RouteTarget& goal,
                       const RouteOptions& options = {});
PlannedPath plan_route(const ShapeGraph& graph, const CostWeights& weights, const ShapeLibrary& lib,
                       const RouteTarget& start, std::span<const RouteTarget> waypoints, const RouteTarget& goal,
                       const RouteOptions& options = {});

// Tip path length, sum of squared activation norms over all path nodes, and
// total variation of the activations.
PathMetrics compute_metrics(const PlannedPath& path, const ShapeLibrary& lib);
PathMetrics compute_metrics(std::span<const NodeId> nodes, const ShapeLibrary& lib);

}  // namespace ssg
