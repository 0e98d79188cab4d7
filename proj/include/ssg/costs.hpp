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

#include <stdexcept>
#include <vector>

#include "ssg/knn_graph.hpp"
#include "ssg/rod_model.hpp"
#include "ssg/shape_library.hpp"

namespace ssg {

class CostConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// w(i, j) = alpha * d_rms + beta * d_mag + delta * d_smo
struct CostWeights {
  double alpha = 1.0;
  double beta = 0.0;
  double delta = 0.0;
  Mat3 K = Mat3::Identity();

  // alpha > 0, beta >= 0, delta >= 0, K symmetric PSD (eigenvalues >= -1e-12).
  void validate() const;

  static CostWeights geometry_only() { return {1.0, 0.0, 0.0, Mat3::Identity()}; }
  static CostWeights energy_aware() { return {1.0, 1.0, 1.0, Mat3::Identity()}; }
};

// 1/2 (gi' K gi + gj' K gj)
double activation_energy(const Vec3& gi, const Vec3& gj, const Mat3& K);
// |gi - gj|^2
double activation_rate(const Vec3& gi, const Vec3& gj);
double edge_weight(double d_rms, const Vec3& gi, const Vec3& gj, const CostWeights& w);

// Per-edge weights indexed by EdgeId. Dead edges get +infinity.
std::vector<double> edge_weights(const ShapeGraph& graph, const ShapeLibrary& lib, const CostWeights& w);

}  // namespace ssg
