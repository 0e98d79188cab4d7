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
#include <string>

#include <json.hpp>

#include "ssg/costs.hpp"
#include "ssg/planner.hpp"

namespace ssg {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Deterministic content only: wall-clock search time is not included.
nlohmann::ordered_json path_to_json(const PlannedPath& path, const PathMetrics& metrics, const CostWeights& weights,
                                    const std::string& scenario_name);

// One row per path step: step,node,leg,tip_x,tip_y,tip_z,gamma_1,gamma_2,gamma_3
std::string path_to_csv(const PlannedPath& path);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace ssg
