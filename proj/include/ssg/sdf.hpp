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

#include <Eigen/Geometry>

#include <cstdint>
#include <span>
#include <vector>

#include "ssg/knn_graph.hpp"
#include "ssg/rod_model.hpp"
#include "ssg/shape_library.hpp"

namespace ssg {

enum class ObstacleKind { Box, Cylinder, Sphere };

// Analytic obstacle in its own frame: a box with half-extents, a capped
// cylinder along the local z axis (radius, half-height) or a sphere (radius).
class Obstacle {
 public:
  static Obstacle box(const Vec3& center, const Vec3& half_extents,
                      const Eigen::Quaterniond& rotation = Eigen::Quaterniond::Identity());
  static Obstacle cylinder(const Vec3& center, double radius, double half_height,
                           const Eigen::Quaterniond& rotation = Eigen::Quaterniond::Identity());
  static Obstacle sphere(const Vec3& center, double radius);

  // Throws std::invalid_argument on non-positive dims or a non-unit quaternion.
  Obstacle(ObstacleKind kind, const Vec3& center, const Eigen::Quaterniond& rotation, std::vector<double> dims);

  ObstacleKind kind() const { return kind_; }
  const Vec3& center() const { return center_; }
  const Eigen::Quaterniond& rotation() const { return rotation_; }
  const std::vector<double>& dims() const { return dims_; }

  // World point -> obstacle frame.
  Vec3 to_local(const Vec3& p) const { return inverse_ * (p - center_); }

 private:
  ObstacleKind kind_;
  Vec3 center_;
  Eigen::Quaterniond rotation_;
  Mat3 inverse_;
  std::vector<double> dims_;
};

double sdf_eval(const Obstacle& obs, const Vec3& p);

// Minimum SDF over every obstacle and centerline point, minus rho_tube.
// +infinity when there are no obstacles.
double node_clearance(const CenterlineShape& shape, std::span<const Obstacle> obstacles, double rho_tube);
double node_clearance(ShapeView points, std::span<const Obstacle> obstacles, double rho_tube);

struct ClearanceReport {
  std::vector<double> clearance;
  std::vector<std::uint8_t> alive;
};

// A node survives iff clearance > margin (margin defaults to 0). Edges touching
// a dead node are marked dead.
ClearanceReport prune_nodes(ShapeGraph& graph, const ShapeLibrary& lib, std::span<const Obstacle> obstacles,
                            double rho_tube, double margin = 0.0);

// Checks `steps` interior blends (1-t) R_i + t R_j, t = s/(steps+1), of every
// alive edge and kills edges with any blend clearance <= margin. Returns the
// number of edges removed.
std::size_t sweep_edges(ShapeGraph& graph, const ShapeLibrary& lib, std::span<const Obstacle> obstacles,
                        double rho_tube, std::size_t steps, double margin = 0.0);

// Smallest clearance over the interior blends of one edge.
double edge_min_clearance(const ShapeLibrary& lib, NodeId i, NodeId j, std::span<const Obstacle> obstacles,
                          double rho_tube, std::size_t steps);

}  // namespace ssg
