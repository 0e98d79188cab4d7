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

#include "ssg/planner.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <queue>
#include <utility>

namespace ssg {

SearchResult dijkstra(const ShapeGraph& graph, std::span<const double> weights, NodeId start, NodeId goal) {
  const std::size_t n = graph.node_count();
  if (weights.size() != graph.edge_count()) throw std::invalid_argument("dijkstra: weight count != edge count");
  if (start >= n || goal >= n) throw std::out_of_range("dijkstra: node index out of range");
  if (!graph.node_alive(start) || !graph.node_alive(goal)) {
    throw PlanningError(PlanningError::Kind::PrunedEndpoint,
                        "dijkstra: " + std::string(!graph.node_alive(start) ? "start" : "goal") + " node " +
                            std::to_string(!graph.node_alive(start) ? start : goal) + " is pruned");
  }

  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr NodeId kNone = std::numeric_limits<NodeId>::max();
  std::vector<double> dist(n, kInf);
  std::vector<NodeId> prev(n, kNone);
  std::vector<std::uint8_t> settled(n, 0);
  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> frontier;

  dist[start] = 0.0;
  frontier.emplace(0.0, start);
  while (!frontier.empty()) {
    const auto [du, u] = frontier.top();
    frontier.pop();
    if (settled[u]) continue;
    settled[u] = 1;
    if (u == goal) break;
    for (const AdjEntry& a : graph.neighbors(u)) {
      const NodeId v = a.neighbor;
      if (settled[v] || !graph.edge_alive(a.edge) || !graph.node_alive(v)) continue;
      const double w = weights[a.edge];
      if (!(w < kInf)) continue;
      const double nd = du + w;
      if (nd < dist[v]) {
        dist[v] = nd;
        prev[v] = u;
        frontier.emplace(nd, v);
      }
    }
  }

  if (!settled[goal]) {
    throw PlanningError(PlanningError::Kind::Unreachable, "dijkstra: goal node " + std::to_string(goal) +
                                                              " is unreachable from start node " +
                                                              std::to_string(start));
  }
  SearchResult result;
  result.cost = dist[goal];
  for (NodeId v = goal; v != kNone; v = prev[v]) result.nodes.push_back(v);
  std::reverse(result.nodes.begin(), result.nodes.end());
  return result;
}

SearchResult dijkstra(const ShapeGraph& graph, const CostWeights& weights, const ShapeLibrary& lib, NodeId start,
                      NodeId goal) {
  const auto w = edge_weights(graph, lib, weights);
  return dijkstra(graph, w, start, goal);
}

double path_cost(const ShapeGraph& graph, std::span<const double> weights, std::span<const NodeId> nodes) {
  double cost = 0.0;
  for (std::size_t t = 0; t + 1 < nodes.size(); ++t) {
    auto e = graph.find_edge(nodes[t], nodes[t + 1]);
    if (!e || !graph.edge_alive(*e)) {
      throw std::invalid_argument("path_cost: no alive edge between " + std::to_string(nodes[t]) + " and " +
                                  std::to_string(nodes[t + 1]));
    }
    cost += weights[*e];
  }
  return cost;
}

NodeId snap_target(const ShapeLibrary& lib, const ShapeGraph& graph, const RouteTarget& target, double* distance) {
  const auto alive = graph.node_alive_mask();
  if (const auto* s = std::get_if<ShapeTarget>(&target)) {
    NodeId id = nearest_node(lib, s->shape, alive);
    if (distance) *distance = shape_distance(s->shape, lib.shape(id));
    return id;
  }
  const Vec3& p = std::get<TipTarget>(target).point;
  NodeId id = nearest_node_by_tip(lib, p, alive);
  if (distance) *distance = (lib.tip(id) - p).norm();
  return id;
}

PlannedPath plan_route(const ShapeGraph& graph, std::span<const double> weights, const ShapeLibrary& lib,
                       const RouteTarget& start, std::span<const RouteTarget> waypoints, const RouteTarget& goal,
                       const RouteOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<const RouteTarget*> targets;
  targets.push_back(&start);
  for (const auto& w : waypoints) targets.push_back(&w);
  targets.push_back(&goal);

  PlannedPath path;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    double d = 0.0;
    NodeId id;
    try {
      id = snap_target(lib, graph, *targets[t], &d);
    } catch (const NoAliveNodeError& e) {
      throw PlanningError(PlanningError::Kind::PrunedEndpoint, e.what(), t == 0 ? 0 : t - 1);
    }
    if (d > options.snap_tolerance) {
      const std::string which = t == 0 ? "start" : t + 1 == targets.size() ? "goal" : "waypoint " + std::to_string(t);
      throw PlanningError(PlanningError::Kind::Unreachable,
                          which + " is unreachable: nearest collision-free node " + std::to_string(id) +
                              " is " + std::to_string(d) + " away (snap tolerance " +
                              std::to_string(options.snap_tolerance) + ")",
                          t == 0 ? 0 : t - 1);
    }
    path.snapped_targets.push_back(id);
    path.snap_distances.push_back(d);
  }

  path.nodes.push_back(path.snapped_targets.front());
  path.segment_boundaries.push_back(0);
  for (std::size_t leg = 0; leg + 1 < path.snapped_targets.size(); ++leg) {
    SearchResult r;
    try {
      r = dijkstra(graph, weights, path.snapped_targets[leg], path.snapped_targets[leg + 1]);
    } catch (const PlanningError& e) {
      throw PlanningError(e.kind(), "leg " + std::to_string(leg) + ": " + e.what(), leg);
    }
    path.nodes.insert(path.nodes.end(), r.nodes.begin() + 1, r.nodes.end());
    path.segment_boundaries.push_back(path.nodes.size() - 1);
    path.leg_costs.push_back(r.cost);
    path.total_cost += r.cost;
  }
  path.search_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  path.activations.reserve(path.nodes.size());
  path.shapes.reserve(path.nodes.size());
  for (NodeId id : path.nodes) {
    path.activations.push_back(lib.gamma(id));
    path.shapes.emplace_back(lib.shape_view(id));
  }
  return path;
}

PlannedPath plan_route(const ShapeGraph& graph, const CostWeights& weights, const ShapeLibrary& lib,
                       const RouteTarget& start, std::span<const RouteTarget> waypoints, const RouteTarget& goal,
                       const RouteOptions& options) {
  const auto w = edge_weights(graph, lib, weights);
  return plan_route(graph, w, lib, start, waypoints, goal, options);
}

PathMetrics compute_metrics(std::span<const NodeId> nodes, const ShapeLibrary& lib) {
  if (nodes.empty()) throw std::invalid_argument("compute_metrics: empty path");
  PathMetrics m;
  m.node_count = nodes.size();
  for (std::size_t t = 0; t < nodes.size(); ++t) {
    m.energy += lib.gamma(nodes[t]).squaredNorm();
    if (t + 1 < nodes.size()) {
      m.tip_length += (lib.tip(nodes[t + 1]) - lib.tip(nodes[t])).norm();
      m.smoothness += (lib.gamma(nodes[t + 1]) - lib.gamma(nodes[t])).norm();
    }
  }
  return m;
}

PathMetrics compute_metrics(const PlannedPath& path, const ShapeLibrary& lib) {
  PathMetrics m = compute_metrics(path.nodes, lib);
  m.search_time = path.search_seconds;
  return m;
}

}  // namespace ssg
