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

#include <doctest.h>

#include <cmath>
#include <random>

#include "ssg/planner.hpp"
#include "ssg/sdf.hpp"
#include "support/oracles.hpp"

using namespace ssg;

namespace {

struct RandomGraph {
  ShapeGraph graph;
  std::vector<double> weights;
};

// Connected-or-not random graph with positive weights.
RandomGraph random_graph(std::mt19937_64& rng, std::size_t n, double density) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j)
      if (u(rng) < density) edges.push_back({i, j, 0.0});
  RandomGraph out{ShapeGraph::from_edges(n, edges), {}};
  for (std::size_t e = 0; e < out.graph.edge_count(); ++e) out.weights.push_back(0.05 + u(rng));
  return out;
}

ShapeLibrary seeded_library(std::size_t n, std::size_t n_z, std::uint64_t seed) {
  return generate_library(FilamentShapeSource(ActuationMap::default_map(), 1.0), n, n_z, seed);
}

double naive_tip_length(const std::vector<NodeId>& nodes, const ShapeLibrary& lib) {
  double s = 0.0;
  for (std::size_t t = 1; t < nodes.size(); ++t) {
    Vec3 a = lib.tip(nodes[t - 1]), b = lib.tip(nodes[t]);
    s += std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]));
  }
  return s;
}

}  // namespace

TEST_CASE("three-node example takes the cheaper two-hop route") {
  auto g = ShapeGraph::from_edges(3, {{0, 1, 0.0}, {1, 2, 0.0}, {0, 2, 0.0}});
  // Edges are sorted (0,1), (0,2), (1,2).
  std::vector<double> w = {1.0, 3.0, 1.0};
  auto r = dijkstra(g, w, 0, 2);
  CHECK(r.nodes == std::vector<NodeId>{0, 1, 2});
  CHECK(r.cost == 2.0);
}

TEST_CASE("start equal to goal gives a single node at zero cost") {
  auto g = ShapeGraph::from_edges(2, {{0, 1, 0.0}});
  std::vector<double> w = {1.0};
  auto r = dijkstra(g, w, 1, 1);
  CHECK(r.nodes == std::vector<NodeId>{1});
  CHECK(r.cost == 0.0);
}

TEST_CASE("disconnected and pruned endpoints are reported") {
  auto g = ShapeGraph::from_edges(4, {{0, 1, 0.0}, {2, 3, 0.0}});
  std::vector<double> w = {1.0, 1.0};
  try {
    dijkstra(g, w, 0, 3);
    FAIL("expected PlanningError");
  } catch (const PlanningError& e) {
    CHECK(e.kind() == PlanningError::Kind::Unreachable);
  }
  g.set_node_alive(3, false);
  try {
    dijkstra(g, w, 2, 3);
    FAIL("expected PlanningError");
  } catch (const PlanningError& e) {
    CHECK(e.kind() == PlanningError::Kind::PrunedEndpoint);
  }
  // A dead edge cuts the only route.
  g.reset_alive();
  g.set_edge_alive(0, false);
  CHECK_THROWS_AS(dijkstra(g, w, 0, 1), PlanningError);
}

TEST_CASE("zero-weight edges are allowed") {
  auto g = ShapeGraph::from_edges(3, {{0, 1, 0.0}, {1, 2, 0.0}});
  std::vector<double> w = {0.0, 0.0};
  auto r = dijkstra(g, w, 0, 2);
  CHECK(r.cost == 0.0);
  CHECK(r.nodes.size() == 3);
}

TEST_CASE("cost equals exhaustive simple-path enumeration") {
  std::mt19937_64 rng(100);
  int reachable = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + rng() % 11;
    auto rg = random_graph(rng, n, 0.4);
    const NodeId s = static_cast<NodeId>(rng() % n), goal = static_cast<NodeId>(rng() % n);
    const double oracle = test::brute_force_shortest(n, rg.graph.edges(), rg.weights, s, goal);
    if (std::isinf(oracle)) {
      CHECK_THROWS_AS(dijkstra(rg.graph, rg.weights, s, goal), PlanningError);
      continue;
    }
    auto r = dijkstra(rg.graph, rg.weights, s, goal);
    CHECK(r.cost == oracle);
    CHECK(path_cost(rg.graph, rg.weights, r.nodes) == r.cost);
    ++reachable;
  }
  CHECK(reachable > 50);
}

TEST_CASE("every prefix of a returned path is optimal") {
  std::mt19937_64 rng(101);
  for (int t = 0; t < 30; ++t) {
    auto rg = random_graph(rng, 40, 0.15);
    const NodeId s = 0, goal = 39;
    SearchResult r;
    try {
      r = dijkstra(rg.graph, rg.weights, s, goal);
    } catch (const PlanningError&) {
      continue;
    }
    for (std::size_t p = 1; p < r.nodes.size(); ++p) {
      auto sub = dijkstra(rg.graph, rg.weights, s, r.nodes[p]);
      CHECK(sub.nodes == std::vector<NodeId>(r.nodes.begin(), r.nodes.begin() + p + 1));
    }
  }
}

TEST_CASE("equal-cost routes resolve deterministically") {
  // Square 0-1-3 and 0-2-3 with equal weights.
  auto g = ShapeGraph::from_edges(4, {{0, 1, 0.0}, {0, 2, 0.0}, {1, 3, 0.0}, {2, 3, 0.0}});
  std::vector<double> w = {1.0, 1.0, 1.0, 1.0};
  auto a = dijkstra(g, w, 0, 3);
  CHECK(a.nodes == std::vector<NodeId>{0, 1, 3});
  CHECK(dijkstra(g, w, 0, 3).nodes == a.nodes);
}

TEST_CASE("geometry-only cost equals the summed shape distance") {
  auto lib = seeded_library(800, 30, 5);
  auto g = build_knn_graph(lib, 8);
  for (NodeId goal : {17u, 301u, 799u}) {
    auto r = dijkstra(g, CostWeights::geometry_only(), lib, 0, goal);
    double sum = 0.0;
    for (std::size_t t = 1; t < r.nodes.size(); ++t)
      sum += test::naive_rms(lib.shape(r.nodes[t - 1]).points, lib.shape(r.nodes[t]).points);
    CHECK(std::abs(r.cost - sum) < 1e-9);
  }
}

TEST_CASE("uniform weight scaling leaves the node sequence unchanged") {
  auto lib = seeded_library(800, 30, 6);
  auto g = build_knn_graph(lib, 8);
  for (const CostWeights& base : {CostWeights::geometry_only(), CostWeights::energy_aware(),
                                 CostWeights{1.0, 0.3, 2.0, Mat3::Identity()}}) {
    auto ref = dijkstra(g, base, lib, 0, 555);
    for (double c : {0.5, 4.0, 0.37, 3.0}) {
      CostWeights s{c * base.alpha, c * base.beta, c * base.delta, base.K};
      auto r = dijkstra(g, s, lib, 0, 555);
      CHECK(r.nodes == ref.nodes);
      CHECK(r.cost == doctest::Approx(c * ref.cost).epsilon(1e-12));
    }
  }
}

TEST_CASE("metric examples") {
  CenterlineShape a{test::straight_shape(5), uniform_arc_params(1.0, 5)};
  PointMatrix bp = test::straight_shape(5);
  bp(4, 1) = 0.1;
  auto lib = test::make_library({a.points, bp}, {Vec3::Zero(), Vec3(-1, 0, 0)});
  std::vector<NodeId> two = {0, 1};
  auto m = compute_metrics(two, lib);
  CHECK(m.tip_length == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(m.energy == 1.0);
  CHECK(m.smoothness == 1.0);
  CHECK(m.node_count == 2);

  std::vector<NodeId> one = {1};
  auto s = compute_metrics(one, lib);
  CHECK(s.tip_length == 0.0);
  CHECK(s.smoothness == 0.0);
  CHECK(s.energy == 1.0);
}

TEST_CASE("metrics match naive loops on random paths") {
  auto lib = seeded_library(300, 20, 7);
  std::mt19937_64 rng(8);
  for (int t = 0; t < 50; ++t) {
    std::vector<NodeId> nodes(1 + rng() % 30);
    for (auto& v : nodes) v = static_cast<NodeId>(rng() % lib.size());
    double e = 0.0, tv = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const Vec3& g = lib.gamma(nodes[k]);
      e += g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
      if (k > 0) {
        const Vec3& p = lib.gamma(nodes[k - 1]);
        tv += std::sqrt((g[0] - p[0]) * (g[0] - p[0]) + (g[1] - p[1]) * (g[1] - p[1]) + (g[2] - p[2]) * (g[2] - p[2]));
      }
    }
    auto m = compute_metrics(nodes, lib);
    CHECK(std::abs(m.tip_length - naive_tip_length(nodes, lib)) < 1e-12);
    CHECK(std::abs(m.energy - e) < 1e-12);
    CHECK(std::abs(m.smoothness - tv) < 1e-12);
  }
}

TEST_CASE("route without waypoints equals one Dijkstra call") {
  auto lib = seeded_library(600, 25, 9);
  auto g = build_knn_graph(lib, 8);
  auto w = edge_weights(g, lib, CostWeights::energy_aware());
  auto path = plan_route(g, w, lib, ShapeTarget{lib.shape(0)}, {}, ShapeTarget{lib.shape(321)});
  auto direct = dijkstra(g, w, 0, 321);
  CHECK(path.nodes == direct.nodes);
  CHECK(path.total_cost == direct.cost);
  CHECK(path.segment_boundaries == std::vector<std::size_t>{0, path.nodes.size() - 1});
  CHECK(path.snap_distances == std::vector<double>{0.0, 0.0});
  CHECK(path.activations.size() == path.nodes.size());
  CHECK(path.shapes.size() == path.nodes.size());
}

TEST_CASE("a waypoint at a node's tip puts that node on the path") {
  auto lib = seeded_library(600, 25, 10);
  auto g = build_knn_graph(lib, 8);
  auto w = edge_weights(g, lib, CostWeights::geometry_only());
  std::vector<RouteTarget> wp = {TipTarget{lib.tip(250)}};
  auto path = plan_route(g, w, lib, ShapeTarget{lib.shape(0)}, wp, TipTarget{lib.tip(499)});
  CHECK(path.snapped_targets == std::vector<NodeId>{0, 250, 499});
  CHECK(path.nodes[path.segment_boundaries[1]] == 250);
  CHECK(path.snap_distances[1] == 0.0);
  // Joint nodes appear once.
  for (std::size_t t = 1; t < path.nodes.size(); ++t) CHECK(path.nodes[t] != path.nodes[t - 1]);
}

TEST_CASE("five-waypoint route re-verifies leg by leg") {
  auto lib = seeded_library(5000, 40, 11);
  auto g = build_knn_graph(lib, 10);
  std::vector<Obstacle> obs = {Obstacle::cylinder(Vec3(-0.35, 0.15, 0.5), 0.06, 0.5),
                               Obstacle::cylinder(Vec3(-0.1, -0.35, 0.5), 0.06, 0.5)};
  prune_nodes(g, lib, obs, 0.02);
  sweep_edges(g, lib, obs, 0.02, 5);
  auto w = edge_weights(g, lib, CostWeights::energy_aware());
  std::vector<RouteTarget> wps;
  for (NodeId id : {101u, 802u, 1503u, 2704u, 3905u}) {
    if (g.node_alive(id)) wps.push_back(ShapeTarget{lib.shape(id)});
  }
  REQUIRE(wps.size() >= 3);
  auto path = plan_route(g, w, lib, ShapeTarget{lib.shape(0)}, wps, ShapeTarget{lib.shape(0)});
  REQUIRE(path.leg_costs.size() == wps.size() + 1);
  double total = 0.0;
  for (std::size_t leg = 0; leg + 1 < path.segment_boundaries.size(); ++leg) {
    auto again = dijkstra(g, w, path.snapped_targets[leg], path.snapped_targets[leg + 1]);
    CHECK(again.cost == path.leg_costs[leg]);
    std::vector<NodeId> slice(path.nodes.begin() + path.segment_boundaries[leg],
                              path.nodes.begin() + path.segment_boundaries[leg + 1] + 1);
    CHECK(slice == again.nodes);
    total += again.cost;
  }
  CHECK(path.total_cost == total);
  for (NodeId v : path.nodes) CHECK(test::naive_clearance(lib.shape(v).points, obs, 0.02) > 0.0);
}

TEST_CASE("route failures name the leg") {
  // Two components: {0, 1} and {2, 3}.
  auto lib = test::make_library({test::straight_shape(5), test::straight_shape(5, Vec3(0.1, 0, 0)),
                                 test::straight_shape(5, Vec3(5, 0, 0)), test::straight_shape(5, Vec3(5.1, 0, 0))});
  auto g = ShapeGraph::from_edges(4, {{0, 1, 0.1}, {2, 3, 0.1}});
  std::vector<double> w = {0.1, 0.1};
  std::vector<RouteTarget> wp = {ShapeTarget{lib.shape(1)}};
  try {
    plan_route(g, w, lib, ShapeTarget{lib.shape(0)}, wp, ShapeTarget{lib.shape(3)});
    FAIL("expected PlanningError");
  } catch (const PlanningError& e) {
    CHECK(e.kind() == PlanningError::Kind::Unreachable);
    REQUIRE(e.leg().has_value());
    CHECK(*e.leg() == 1);
  }
}

TEST_CASE("targets beyond the snap tolerance are unreachable") {
  auto lib = test::make_library({test::straight_shape(5), test::straight_shape(5, Vec3(0.1, 0, 0))});
  auto g = ShapeGraph::from_edges(2, {{0, 1, 0.1}});
  std::vector<double> w = {0.1};
  CenterlineShape far{test::straight_shape(5, Vec3(3, 0, 0)), uniform_arc_params(1.0, 5)};
  CHECK_THROWS_AS(plan_route(g, w, lib, ShapeTarget{lib.shape(0)}, {}, ShapeTarget{far}, RouteOptions{0.5}),
                  PlanningError);
  auto ok = plan_route(g, w, lib, ShapeTarget{lib.shape(0)}, {}, ShapeTarget{far});
  CHECK(ok.snapped_targets.back() == 1);
  CHECK(ok.snap_distances.back() == doctest::Approx(2.9));
}

TEST_CASE("snapping skips pruned nodes") {
  auto lib = test::make_library({test::straight_shape(5), test::straight_shape(5, Vec3(0.1, 0, 0)),
                                 test::straight_shape(5, Vec3(0.2, 0, 0))});
  auto g = ShapeGraph::from_edges(3, {{0, 1, 0.1}, {1, 2, 0.1}});
  g.set_node_alive(2, false);
  double d = 0.0;
  CHECK(snap_target(lib, g, ShapeTarget{lib.shape(2)}, &d) == 1);
  CHECK(d == doctest::Approx(0.1));
}
