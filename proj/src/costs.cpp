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

#include "ssg/costs.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace ssg {

void CostWeights::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw CostConfigError("costs.alpha must be > 0");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw CostConfigError("costs.beta must be >= 0");
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw CostConfigError("costs.delta must be >= 0");
  if (!K.allFinite()) throw CostConfigError("costs.K must be finite");
  if ((K - K.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw CostConfigError("costs.K must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(K, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-12) throw CostConfigError("costs.K must be positive semidefinite");
}

double activation_energy(const Vec3& gi, const Vec3& gj, const Mat3& K) {
  return 0.5 * (gi.dot(K * gi) + gj.dot(K * gj));
}

double activation_rate(const Vec3& gi, const Vec3& gj) { return (gi - gj).squaredNorm(); }

double edge_weight(double d_rms, const Vec3& gi, const Vec3& gj, const CostWeights& w) {
  double cost = w.alpha * d_rms;
  if (w.beta != 0.0) cost += w.beta * activation_energy(gi, gj, w.K);
  if (w.delta != 0.0) cost += w.delta * activation_rate(gi, gj);
  return cost;
}

std::vector<double> edge_weights(const ShapeGraph& graph, const ShapeLibrary& lib, const CostWeights& w) {
  w.validate();
  const auto& edges = graph.edges();
  std::vector<double> out(edges.size(), std::numeric_limits<double>::infinity());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t e = 0; e < static_cast<std::ptrdiff_t>(edges.size()); ++e) {
    const auto u = static_cast<std::size_t>(e);
    if (!graph.edge_alive(static_cast<EdgeId>(u))) continue;
    const Edge& ed = edges[u];
    out[u] = edge_weight(ed.d_rms, lib.gamma(ed.i), lib.gamma(ed.j), w);
  }
  return out;
}

}  // namespace ssg
