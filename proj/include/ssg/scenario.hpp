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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssg/costs.hpp"
#include "ssg/planner.hpp"
#include "ssg/rod_model.hpp"
#include "ssg/sdf.hpp"

namespace ssg {

// Invalid configuration; what() starts with the offending field path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

inline constexpr int kScenarioSchemaVersion = 1;

struct TargetSpec {
  enum class Kind { Gamma, Tip, Shape };
  Kind kind = Kind::Gamma;
  Vec3 value = Vec3::Zero();  // gamma or tip point
  PointMatrix shape;          // Kind::Shape only
};

struct NamedWeights {
  std::string name;
  CostWeights weights;
};

struct LibraryConfig {
  std::string path = "library.ssgl";
  std::size_t n = 1000;
  std::size_t n_z = 100;
  double length = 1.0;
  std::uint64_t seed = 1;
  ActuationMap map = ActuationMap::default_map();
};

struct GraphConfig {
  std::string path = "graph.ssgg";
  std::size_t k = 20;
};

struct OutputConfig {
  std::string path_json = "path.json";
  std::string path_csv = "path.csv";
  bool prune_cache = true;
};

struct Scenario {
  std::string name = "scenario";
  std::filesystem::path out_dir = ".";
  LibraryConfig library;
  GraphConfig graph;
  std::vector<Obstacle> obstacles;
  nlohmann::json obstacles_json = nlohmann::json::array();
  double rho_tube = 0.02;
  std::size_t sweep_steps = 5;
  double clearance_margin = 0.0;
  CostWeights costs = CostWeights::energy_aware();
  std::vector<NamedWeights> compare;
  std::optional<TargetSpec> start;
  std::vector<TargetSpec> waypoints;
  std::optional<TargetSpec> goal;
  double snap_tolerance = 0.1;
  OutputConfig output;
  int threads = 0;

  std::filesystem::path resolve(const std::string& p) const;
};

// Relative paths in the document resolve against `base_dir`.
Scenario parse_scenario(const nlohmann::json& doc, const std::filesystem::path& base_dir);
Scenario load_scenario(const std::filesystem::path& path);

Obstacle parse_obstacle(const nlohmann::json& j, const std::string& field);
CostWeights parse_cost_weights(const nlohmann::json& j, const std::string& field);
nlohmann::json cost_weights_json(const CostWeights& w);

// Gamma targets become shapes via forward kinematics with the library's map, n_z and length.
RouteTarget to_route_target(const TargetSpec& spec, const LibraryConfig& lib, std::size_t n_z, double length);

}  // namespace ssg
