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

#include "ssg/sdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ssg {

Obstacle::Obstacle(ObstacleKind kind, const Vec3& center, const Eigen::Quaterniond& rotation, std::vector<double> dims)
    : kind_(kind), center_(center), rotation_(rotation), dims_(std::move(dims)) {
  const std::size_t expected = kind == ObstacleKind::Box ? 3 : kind == ObstacleKind::Cylinder ? 2 : 1;
  if (dims_.size() != expected) throw std::invalid_argument("obstacle: wrong number of dims");
  for (double d : dims_) {
    if (!(d > 0.0) || !std::isfinite(d)) throw std::invalid_argument("obstacle: dims must be strictly positive");
  }
  if (!center_.allFinite()) throw std::invalid_argument("obstacle: non-finite center");
  if (std::abs(rotation_.norm() - 1.0) > 1e-9) throw std::invalid_argument("obstacle: quaternion is not normalized");
  inverse_ = rotation_.toRotationMatrix().transpose();
}

Obstacle Obstacle::box(const Vec3& center, const Vec3& half_extents, const Eigen::Quaterniond& rotation) {
  return Obstacle(ObstacleKind::Box, center, rotation, {half_extents.x(), half_extents.y(), half_extents.z()});
}

Obstacle Obstacle::cylinder(const Vec3& center, double radius, double half_height, const Eigen::Quaterniond& rotation) {
  return Obstacle(ObstacleKind::Cylinder, center, rotation, {radius, half_height});
}

Obstacle Obstacle::sphere(const Vec3& center, double radius) {
  return Obstacle(ObstacleKind::Sphere, center, Eigen::Quaterniond::Identity(), {radius});
}

double sdf_eval(const Obstacle& obs, const Vec3& p) {
  const Vec3 q = obs.to_local(p);
  const auto& dims = obs.dims();
  switch (obs.kind()) {
    case ObstacleKind::Box: {
      const Vec3 d = q.cwiseAbs() - Vec3(dims[0], dims[1], dims[2]);
      const double outside = d.cwiseMax(0.0).norm();
      const double inside = std::min(d.maxCoeff(), 0.0);
      return outside + inside;
    }
    case ObstacleKind::Cylinder: {
      const double dr = std::hypot(q.x(), q.y()) - dims[0];
      const double dz = std::abs(q.z()) - dims[1];
      const double outside = std::hypot(std::max(dr, 0.0), std::max(dz, 0.0));
      const double inside = std::min(std::max(dr, dz), 0.0);
      return outside + inside;
    }
    case ObstacleKind::Sphere:
      return q.norm() - dims[0];
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double node_clearance(ShapeView points, std::span<const Obstacle> obstacles, double rho_tube) {
  if (!(rho_tube > 0.0)) throw std::invalid_argument("node_clearance: rho_tube must be > 0");
  double best = std::numeric_limits<double>::infinity();
  if (obstacles.empty()) return best;
  for (const Obstacle& obs : obstacles) {
    for (Eigen::Index k = 0; k < points.rows(); ++k) {
      best = std::min(best, sdf_eval(obs, points.row(k).transpose()));
    }
  }
  return best - rho_tube;
}

double node_clearance(const CenterlineShape& shape, std::span<const Obstacle> obstacles, double rho_tube) {
  return node_clearance(ShapeView(shape.points.data(), shape.points.rows(), 3), obstacles, rho_tube);
}

ClearanceReport prune_nodes(ShapeGraph& graph, const ShapeLibrary& lib, std::span<const Obstacle> obstacles,
                            double rho_tube, double margin) {
  if (graph.node_count() != lib.size()) throw std::invalid_argument("prune_nodes: graph/library size mismatch");
  const std::size_t n = lib.size();
  ClearanceReport report;
  report.clearance.resize(n);
  report.alive.resize(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    const auto u = static_cast<std::size_t>(i);
    report.clearance[u] = node_clearance(lib.shape_view(u), obstacles, rho_tube);
    report.alive[u] = report.clearance[u] > margin ? 1 : 0;
  }
  std::vector<std::uint8_t> edge_alive(graph.edge_count());
  for (std::size_t e = 0; e < graph.edge_count(); ++e) {
    const Edge& ed = graph.edges()[e];
    edge_alive[e] = (report.alive[ed.i] && report.alive[ed.j]) ? 1 : 0;
  }
  graph.set_alive_masks(report.alive, std::move(edge_alive));
  return report;
}

double edge_min_clearance(const ShapeLibrary& lib, NodeId i, NodeId j, std::span<const Obstacle> obstacles,
                          double rho_tube, std::size_t steps) {
  const ShapeView a = lib.shape_view(i);
  const ShapeView b = lib.shape_view(j);
  PointMatrix blend(a.rows(), 3);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t s = 1; s <= steps; ++s) {
    const double t = static_cast<double>(s) / static_cast<double>(steps + 1);
    blend = (1.0 - t) * a + t * b;
    worst = std::min(worst, node_clearance(ShapeView(blend.data(), blend.rows(), 3), obstacles, rho_tube));
  }
  return worst;
}

std::size_t sweep_edges(ShapeGraph& graph, const ShapeLibrary& lib, std::span<const Obstacle> obstacles,
                        double rho_tube, std::size_t steps, double margin) {
  if (steps < 1) throw std::invalid_argument("sweep_edges: steps must be >= 1");
  if (graph.node_count() != lib.size()) throw std::invalid_argument("sweep_edges: graph/library size mismatch");
  if (obstacles.empty()) return 0;
  const std::size_t m = graph.edge_count();
  std::vector<std::uint8_t> keep(graph.edge_alive_mask().begin(), graph.edge_alive_mask().end());
#pragma omp parallel for schedule(dynamic, 1024)
  for (std::ptrdiff_t e = 0; e < static_cast<std::ptrdiff_t>(m); ++e) {
    const auto u = static_cast<std::size_t>(e);
    if (!keep[u]) continue;
    const Edge& ed = graph.edges()[u];
    if (!(edge_min_clearance(lib, ed.i, ed.j, obstacles, rho_tube, steps) > margin)) keep[u] = 0;
  }
  std::size_t removed = 0;
  for (std::size_t e = 0; e < m; ++e) {
    if (graph.edge_alive(static_cast<EdgeId>(e)) && !keep[e]) {
      graph.set_edge_alive(static_cast<EdgeId>(e), false);
      ++removed;
    }
  }
  return removed;
}

}  // namespace ssg
