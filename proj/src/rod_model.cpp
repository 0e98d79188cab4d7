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

#include "ssg/rod_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "binary_io.hpp"

namespace ssg {

bool ActivationVector::within_bounds() const {
  for (int i = 0; i < 3; ++i) {
    double g = value[i];
    if (!std::isfinite(g) || g < kGammaMin || g > kGammaMax) return false;
  }
  return true;
}

ActuationMap::ActuationMap(const Mat3& curvature_matrix, const Vec3& extension_coeffs)
    : curvature_(curvature_matrix), extension_(extension_coeffs) {
  if (!curvature_.allFinite() || !extension_.allFinite()) {
    throw RodModelError("actuation map: non-finite coefficients");
  }
  if (min_extension() <= 0.0) {
    throw RodModelError("actuation map: intrinsic extension reaches <= 0 inside the activation box");
  }
}

ActuationMap ActuationMap::default_map() {
  // Rows: (u1, u2, u3). Columns: straight fiber, helical fiber A, helical fiber B.
  // The straight fiber bends about d2. The helical pair shares bending about d2,
  // has opposite bending about d1 and opposite twist, so equal pair activations
  // give a planar x-z shape.
  Mat3 b;
  b << 0.0, 0.9, -0.9,
       2.0, 1.2, 1.2,
       0.0, 1.6, -1.6;
  Vec3 c(0.12, 0.08, 0.08);
  return ActuationMap(b, c);
}

double ActuationMap::min_extension() const {
  double lo = 1.0;
  for (int i = 0; i < 3; ++i) lo += std::min(extension_[i] * kGammaMin, extension_[i] * kGammaMax);
  return lo;
}

double ActuationMap::max_extension() const {
  double hi = 1.0;
  for (int i = 0; i < 3; ++i) hi += std::max(extension_[i] * kGammaMin, extension_[i] * kGammaMax);
  return hi;
}

Digest ActuationMap::digest() const {
  io::Writer w;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) w.f64(curvature_(r, c));
  for (int i = 0; i < 3; ++i) w.f64(extension_[i]);
  return sha256(w.buffer());
}

double DirectorFrame::orthonormality_residual() const {
  const Vec3* d[3] = {&d1, &d2, &d3};
  double worst = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double target = (i == j) ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(d[i]->dot(*d[j]) - target));
    }
  return worst;
}

IntrinsicState actuation_to_intrinsic(const ActuationMap& map, const ActivationVector& gamma) {
  if (!gamma.within_bounds()) {
    throw RodModelError("activation outside [-1.67, 0]^3");
  }
  IntrinsicState s;
  s.u_hat = map.curvature_matrix() * gamma.value;
  s.zeta_hat = 1.0 + map.extension_coeffs().dot(gamma.value);
  if (!(s.zeta_hat > 0.0)) {
    throw RodModelError("intrinsic extension must be positive");
  }
  return s;
}

std::vector<double> uniform_arc_params(double length, std::size_t n_z) {
  std::vector<double> z(n_z);
  for (std::size_t k = 0; k < n_z; ++k) {
    z[k] = length * static_cast<double>(k) / static_cast<double>(n_z - 1);
  }
  return z;
}

namespace {

Mat3 hat(const Vec3& u) {
  Mat3 m;
  m << 0.0, -u.z(), u.y(),
       u.z(), 0.0, -u.x(),
       -u.y(), u.x(), 0.0;
  return m;
}

void gram_schmidt(Mat3& frame) {
  Vec3 d1 = frame.col(0).normalized();
  Vec3 d2 = frame.col(1) - d1.dot(frame.col(1)) * d1;
  d2.normalize();
  Vec3 d3 = frame.col(2) - d1.dot(frame.col(2)) * d1 - d2.dot(frame.col(2)) * d2;
  d3.normalize();
  frame.col(0) = d1;
  frame.col(1) = d2;
  frame.col(2) = d3;
}

void validate(const IntrinsicState& state, double length, std::size_t n_z) {
  if (!state.u_hat.allFinite() || !std::isfinite(state.zeta_hat)) {
    throw RodModelError("integrate_centerline: non-finite intrinsic state");
  }
  if (!(state.zeta_hat > 0.0)) throw RodModelError("integrate_centerline: zeta_hat must be > 0");
  if (!(length > 0.0) || !std::isfinite(length)) throw RodModelError("integrate_centerline: length must be > 0");
  if (n_z < 2) throw RodModelError("integrate_centerline: n_z must be >= 2");
}

template <typename OnSample>
void integrate(const IntrinsicState& state, double length, std::size_t n_z, OnSample&& on_sample) {
  // r' = zeta * d3, D' = zeta * D * hat(u)   (columns of D are d1, d2, d3)
  const double zeta = state.zeta_hat;
  const Mat3 omega = zeta * hat(state.u_hat);
  const double h = length / static_cast<double>(n_z - 1);

  Vec3 r = Vec3::Zero();
  Mat3 d = Mat3::Identity();
  on_sample(0, r, d);
  for (std::size_t k = 1; k < n_z; ++k) {
    const Vec3 k1r = zeta * d.col(2);
    const Mat3 k1d = d * omega;
    const Mat3 d2 = d + 0.5 * h * k1d;
    const Vec3 k2r = zeta * d2.col(2);
    const Mat3 k2d = d2 * omega;
    const Mat3 d3 = d + 0.5 * h * k2d;
    const Vec3 k3r = zeta * d3.col(2);
    const Mat3 k3d = d3 * omega;
    const Mat3 d4 = d + h * k3d;
    const Vec3 k4r = zeta * d4.col(2);
    const Mat3 k4d = d4 * omega;

    r += (h / 6.0) * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
    d += (h / 6.0) * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
    gram_schmidt(d);
    on_sample(k, r, d);
  }
}

}  // namespace

CenterlineShape integrate_centerline(const IntrinsicState& state, double length, std::size_t n_z) {
  validate(state, length, n_z);
  CenterlineShape shape;
  shape.points.resize(static_cast<Eigen::Index>(n_z), 3);
  shape.arc_params = uniform_arc_params(length, n_z);
  integrate(state, length, n_z, [&](std::size_t k, const Vec3& r, const Mat3&) {
    shape.points.row(static_cast<Eigen::Index>(k)) = r.transpose();
  });
  return shape;
}

IntegrationResult integrate_with_frames(const IntrinsicState& state, double length, std::size_t n_z) {
  validate(state, length, n_z);
  IntegrationResult out;
  out.shape.points.resize(static_cast<Eigen::Index>(n_z), 3);
  out.shape.arc_params = uniform_arc_params(length, n_z);
  out.frames.resize(n_z);
  integrate(state, length, n_z, [&](std::size_t k, const Vec3& r, const Mat3& d) {
    out.shape.points.row(static_cast<Eigen::Index>(k)) = r.transpose();
    out.frames[k] = DirectorFrame{d.col(0), d.col(1), d.col(2)};
  });
  return out;
}

CenterlineShape forward_kinematics(const ActuationMap& map, const ActivationVector& gamma,
                                   double length, std::size_t n_z) {
  return integrate_centerline(actuation_to_intrinsic(map, gamma), length, n_z);
}

}  // namespace ssg
