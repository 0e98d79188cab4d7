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

#include "ssg/path_export.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ssg/scenario.hpp"

namespace ssg {

nlohmann::ordered_json path_to_json(const PlannedPath& path, const PathMetrics& metrics, const CostWeights& weights,
                                    const std::string& scenario_name) {
  using nlohmann::ordered_json;
  ordered_json activations = ordered_json::array();
  for (const Vec3& g : path.activations) activations.push_back({g[0], g[1], g[2]});
  ordered_json centerlines = ordered_json::array();
  for (const PointMatrix& s : path.shapes) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index k = 0; k < s.rows(); ++k) rows.push_back({s(k, 0), s(k, 1), s(k, 2)});
    centerlines.push_back(std::move(rows));
  }
  ordered_json w;
  const auto wj = cost_weights_json(weights);
  for (const char* key : {"alpha", "beta", "delta", "K"}) w[key] = wj[key];

  ordered_json doc;
  doc["schema_version"] = 1;
  doc["scenario"] = scenario_name;
  doc["weights"] = w;
  doc["nodes"] = path.nodes;
  doc["segment_boundaries"] = path.segment_boundaries;
  doc["snapped_targets"] = path.snapped_targets;
  doc["snap_distances"] = path.snap_distances;
  doc["leg_costs"] = path.leg_costs;
  doc["total_cost"] = path.total_cost;
  doc["metrics"] = {{"n_nodes", metrics.node_count},
                    {"tip_length", metrics.tip_length},
                    {"energy", metrics.energy},
                    {"smoothness", metrics.smoothness}};
  doc["activations"] = std::move(activations);
  doc["centerlines"] = std::move(centerlines);
  return doc;
}

std::string path_to_csv(const PlannedPath& path) {
  std::ostringstream out;
  out << "step,node,leg,tip_x,tip_y,tip_z,gamma_1,gamma_2,gamma_3\n";
  std::size_t leg = 0;
  char buf[512];
  for (std::size_t t = 0; t < path.nodes.size(); ++t) {
    while (leg + 1 < path.segment_boundaries.size() - 1 && t > path.segment_boundaries[leg + 1]) ++leg;
    const PointMatrix& s = path.shapes[t];
    const Eigen::Index last = s.rows() - 1;
    const Vec3& g = path.activations[t];
    std::snprintf(buf, sizeof(buf), "%zu,%u,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", t, path.nodes[t], leg,
                  s(last, 0), s(last, 1), s(last, 2), g[0], g[1], g[2]);
    out << buf;
  }
  return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("cannot write " + path);
}

}  // namespace ssg
