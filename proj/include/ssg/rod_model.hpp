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

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "ssg/digest.hpp"

namespace ssg {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

// Fiber activations are contraction-only.
inline constexpr double kGammaMin = -1.67;
inline constexpr double kGammaMax = 0.0;

struct ActivationVector {
  Vec3 value = Vec3::Zero();

  ActivationVector() = default;
  explicit ActivationVector(const Vec3& v) : value(v) {}
  ActivationVector(double g1, double g2, double g3) : value(g1, g2, g3) {}

  bool within_bounds() const;
  bool operator==(const ActivationVector& o) const { return value == o.value; }
};

struct IntrinsicState {
  Vec3 u_hat = Vec3::Zero();  // body-frame Darboux curvatures, 1/m
  double zeta_hat = 1.0;      // axial extension, must be > 0
};

/// Affine surrogate for the fiber-to-intrinsic-shape map:
///   u_hat(gamma)    = curvature_matrix * gamma
///   zeta_hat(gamma) = 1 + extension_coeffs . gamma
/// Columns correspond to fibers (straight fiber, helical pair).
class ActuationMap {
 public:
  ActuationMap(const Mat3& curvature_matrix, const Vec3& extension_coeffs);

  // One straight off-axis fiber plus a mirror-symmetric helical pair.
  static ActuationMap default_map();

  const Mat3& curvature_matrix() const { return curvature_; }
  const Vec3& extension_coeffs() const { return extension_; }

  // Smallest zeta_hat over the activation box (attained at a corner).
  double min_extension() const;
  double max_extension() const;

  Digest digest() const;

 private:
  Mat3 curvature_;
  Vec3 extension_;
};

struct DirectorFrame {
  Vec3 d1 = Vec3::UnitX();
  Vec3 d2 = Vec3::UnitY();
  Vec3 d3 = Vec3::UnitZ();

  // max |d_i . d_j - delta_ij|
  double orthonormality_residual() const;
  bool right_handed() const { return d1.cross(d2).dot(d3) > 0.0; }
};

struct CenterlineShape {
  PointMatrix points;             // n_z x 3, row k = r(z_k)
  std::vector<double> arc_params; // z_k in [0, L]

  std::size_t n_z() const { return static_cast<std::size_t>(points.rows()); }
  Vec3 tip() const { return points.row(points.rows() - 1).transpose(); }
  Vec3 base() const { return points.row(0).transpose(); }
};

struct IntegrationResult {
  CenterlineShape shape;
  std::vector<DirectorFrame> frames;  // one per sample point
};

class RodModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

IntrinsicState actuation_to_intrinsic(const ActuationMap& map, const ActivationVector& gamma);

// RK4 with n_z - 1 uniform steps, Gram-Schmidt after each step.
// Base point at the origin, base frame = identity.
CenterlineShape integrate_centerline(const IntrinsicState& state, double length, std::size_t n_z);
IntegrationResult integrate_with_frames(const IntrinsicState& state, double length, std::size_t n_z);

CenterlineShape forward_kinematics(const ActuationMap& map, const ActivationVector& gamma,
                                   double length, std::size_t n_z);

// Uniform material coordinates z_k = k L / (n_z - 1).
std::vector<double> uniform_arc_params(double length, std::size_t n_z);

}  // namespace ssg
