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

#include "ssg/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace ssg {

namespace {

using nlohmann::json;

std::string join(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

void reject_unknown(const json& obj, const std::string& field, std::initializer_list<const char*> allowed) {
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!ok.count(it.key())) throw ConfigError(join(field, it.key()), "unknown field");
  }
}

const json& require_object(const json& j, const std::string& field) {
  if (!j.is_object()) throw ConfigError(field, "expected an object");
  return j;
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) throw ConfigError(field, "expected a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(field, "must be finite");
  return v;
}

std::uint64_t unsigned_int(const json& j, const std::string& field) {
  if (!j.is_number_integer() || (!j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
    throw ConfigError(field, "expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

Vec3 vec3(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(field, "expected an array of 3 numbers");
  return Vec3(number(j[0], field + "[0]"), number(j[1], field + "[1]"), number(j[2], field + "[2]"));
}

Mat3 mat3(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(field, "expected a 3x3 array");
  Mat3 m;
  for (int r = 0; r < 3; ++r) {
    Vec3 row = vec3(j[static_cast<std::size_t>(r)], field + "[" + std::to_string(r) + "]");
    m.row(r) = row.transpose();
  }
  return m;
}

TargetSpec parse_target(const json& j, const std::string& field) {
  require_object(j, field);
  if (j.size() != 1) throw ConfigError(field, "expected exactly one of \"gamma\", \"tip\", \"shape\"");
  TargetSpec t;
  if (j.contains("gamma")) {
    t.kind = TargetSpec::Kind::Gamma;
    t.value = vec3(j["gamma"], field + ".gamma");
    if (!ActivationVector(t.value).within_bounds()) throw ConfigError(field + ".gamma", "outside [-1.67, 0]^3");
  } else if (j.contains("tip")) {
    t.kind = TargetSpec::Kind::Tip;
    t.value = vec3(j["tip"], field + ".tip");
  } else if (j.contains("shape")) {
    t.kind = TargetSpec::Kind::Shape;
    const json& rows = j["shape"];
    if (!rows.is_array() || rows.size() < 2) throw ConfigError(field + ".shape", "expected at least 2 points");
    t.shape.resize(static_cast<Eigen::Index>(rows.size()), 3);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      t.shape.row(static_cast<Eigen::Index>(k)) = vec3(rows[k], field + ".shape[" + std::to_string(k) + "]").transpose();
    }
  } else {
    throw ConfigError(field, "expected exactly one of \"gamma\", \"tip\", \"shape\"");
  }
  return t;
}

}  // namespace

std::filesystem::path Scenario::resolve(const std::string& p) const {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : out_dir / path;
}

Obstacle parse_obstacle(const json& j, const std::string& field) {
  require_object(j, field);
  reject_unknown(j, field, {"kind", "center", "quat", "dims"});
  if (!j.contains("kind") || !j["kind"].is_string()) throw ConfigError(field + ".kind", "expected \"box\", \"cylinder\" or \"sphere\"");
  const std::string kind = j["kind"];
  if (!j.contains("center")) throw ConfigError(field + ".center", "missing");
  const Vec3 center = vec3(j["center"], field + ".center");
  Eigen::Quaterniond q = Eigen::Quaterniond::Identity();
  if (j.contains("quat")) {
    const json& a = j["quat"];
    if (!a.is_array() || a.size() != 4) throw ConfigError(field + ".quat", "expected [w, x, y, z]");
    q = Eigen::Quaterniond(number(a[0], field + ".quat[0]"), number(a[1], field + ".quat[1]"),
                           number(a[2], field + ".quat[2]"), number(a[3], field + ".quat[3]"));
  }
  if (!j.contains("dims") || !j["dims"].is_array()) throw ConfigError(field + ".dims", "expected an array");
  std::vector<double> dims;
  for (std::size_t t = 0; t < j["dims"].size(); ++t) dims.push_back(number(j["dims"][t], field + ".dims"));
  ObstacleKind k;
  if (kind == "box") k = ObstacleKind::Box;
  else if (kind == "cylinder") k = ObstacleKind::Cylinder;
  else if (kind == "sphere") k = ObstacleKind::Sphere;
  else throw ConfigError(field + ".kind", "unknown obstacle kind \"" + kind + "\"");
  try {
    return Obstacle(k, center, q, std::move(dims));
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    std::string sub;
    if (msg.find("dims") != std::string::npos) sub = ".dims";
    else if (msg.find("quaternion") != std::string::npos) sub = ".quat";
    else if (msg.find("center") != std::string::npos) sub = ".center";
    throw ConfigError(field + sub, msg.substr(msg.find(' ') + 1));
  }
}

CostWeights parse_cost_weights(const json& j, const std::string& field) {
  require_object(j, field);
  reject_unknown(j, field, {"name", "alpha", "beta", "delta", "K"});
  CostWeights w = CostWeights::energy_aware();
  if (j.contains("alpha")) w.alpha = number(j["alpha"], field + ".alpha");
  if (j.contains("beta")) w.beta = number(j["beta"], field + ".beta");
  if (j.contains("delta")) w.delta = number(j["delta"], field + ".delta");
  if (j.contains("K")) w.K = mat3(j["K"], field + ".K");
  try {
    w.validate();
  } catch (const CostConfigError& e) {
    // Messages read "costs.<name> ...": keep the member name, drop the prefix.
    const std::string msg = e.what();
    const std::size_t space = msg.find(' ');
    const std::string name = msg.substr(0, space);
    const std::size_t dot = name.find('.');
    throw ConfigError(dot == std::string::npos ? field : field + name.substr(dot), msg.substr(space + 1));
  }
  return w;
}

json cost_weights_json(const CostWeights& w) {
  json K = json::array();
  for (int r = 0; r < 3; ++r) K.push_back({w.K(r, 0), w.K(r, 1), w.K(r, 2)});
  return json{{"alpha", w.alpha}, {"beta", w.beta}, {"delta", w.delta}, {"K", K}};
}

Scenario parse_scenario(const json& doc, const std::filesystem::path& base_dir) {
  require_object(doc, "$");
  reject_unknown(doc, "", {"schema_version", "name", "library", "graph", "obstacles", "rho_tube", "sweep_steps",
                           "clearance_margin", "costs", "compare", "start", "waypoints", "goal", "snap_tolerance",
                           "output", "threads"});
  Scenario s;
  s.out_dir = base_dir.empty() ? std::filesystem::path(".") : base_dir;
  if (!doc.contains("schema_version")) throw ConfigError("schema_version", "missing");
  if (unsigned_int(doc["schema_version"], "schema_version") != kScenarioSchemaVersion) {
    throw ConfigError("schema_version", "unsupported version (expected " + std::to_string(kScenarioSchemaVersion) + ")");
  }
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) throw ConfigError("name", "expected a string");
    s.name = doc["name"];
  }

  if (doc.contains("library")) {
    const json& l = require_object(doc["library"], "library");
    reject_unknown(l, "library", {"path", "n", "n_z", "length", "seed", "actuation"});
    if (l.contains("path")) {
      if (!l["path"].is_string()) throw ConfigError("library.path", "expected a string");
      s.library.path = l["path"];
    }
    if (l.contains("n")) s.library.n = unsigned_int(l["n"], "library.n");
    if (l.contains("n_z")) s.library.n_z = unsigned_int(l["n_z"], "library.n_z");
    if (l.contains("length")) s.library.length = number(l["length"], "library.length");
    if (l.contains("seed")) s.library.seed = unsigned_int(l["seed"], "library.seed");
    if (s.library.n < 1) throw ConfigError("library.n", "must be >= 1");
    if (s.library.n_z < 2) throw ConfigError("library.n_z", "must be >= 2");
    if (!(s.library.length > 0.0)) throw ConfigError("library.length", "must be > 0");
    if (l.contains("actuation")) {
      const json& a = require_object(l["actuation"], "library.actuation");
      reject_unknown(a, "library.actuation", {"curvature_matrix", "extension_coeffs"});
      if (!a.contains("curvature_matrix")) throw ConfigError("library.actuation.curvature_matrix", "missing");
      if (!a.contains("extension_coeffs")) throw ConfigError("library.actuation.extension_coeffs", "missing");
      try {
        s.library.map = ActuationMap(mat3(a["curvature_matrix"], "library.actuation.curvature_matrix"),
                                     vec3(a["extension_coeffs"], "library.actuation.extension_coeffs"));
      } catch (const RodModelError& e) {
        throw ConfigError("library.actuation", e.what());
      }
    }
  }

  if (doc.contains("graph")) {
    const json& g = require_object(doc["graph"], "graph");
    reject_unknown(g, "graph", {"path", "k"});
    if (g.contains("path")) {
      if (!g["path"].is_string()) throw ConfigError("graph.path", "expected a string");
      s.graph.path = g["path"];
    }
    if (g.contains("k")) s.graph.k = unsigned_int(g["k"], "graph.k");
    if (s.graph.k < 1) throw ConfigError("graph.k", "must be >= 1");
  }

  if (doc.contains("obstacles")) {
    const json& obs = doc["obstacles"];
    if (!obs.is_array()) throw ConfigError("obstacles", "expected an array");
    for (std::size_t t = 0; t < obs.size(); ++t) {
      s.obstacles.push_back(parse_obstacle(obs[t], "obstacles[" + std::to_string(t) + "]"));
    }
    s.obstacles_json = obs;
  }

  if (doc.contains("rho_tube")) s.rho_tube = number(doc["rho_tube"], "rho_tube");
  if (!(s.rho_tube > 0.0)) throw ConfigError("rho_tube", "must be > 0");
  if (doc.contains("sweep_steps")) s.sweep_steps = unsigned_int(doc["sweep_steps"], "sweep_steps");
  if (s.sweep_steps < 1) throw ConfigError("sweep_steps", "must be >= 1");
  if (doc.contains("clearance_margin")) s.clearance_margin = number(doc["clearance_margin"], "clearance_margin");
  if (s.clearance_margin < 0.0) throw ConfigError("clearance_margin", "must be >= 0");

  if (doc.contains("costs")) s.costs = parse_cost_weights(doc["costs"], "costs");
  if (doc.contains("compare")) {
    const json& c = doc["compare"];
    if (!c.is_array() || c.empty()) throw ConfigError("compare", "expected a non-empty array");
    for (std::size_t t = 0; t < c.size(); ++t) {
      const std::string field = "compare[" + std::to_string(t) + "]";
      NamedWeights nw;
      nw.weights = parse_cost_weights(c[t], field);
      nw.name = c[t].value("name", "set " + std::to_string(t));
      s.compare.push_back(std::move(nw));
    }
  } else {
    s.compare = {{"SDF only", CostWeights::geometry_only()}, {"SDF + energy", CostWeights::energy_aware()}};
  }

  if (doc.contains("start")) s.start = parse_target(doc["start"], "start");
  if (doc.contains("goal")) s.goal = parse_target(doc["goal"], "goal");
  if (doc.contains("waypoints")) {
    const json& w = doc["waypoints"];
    if (!w.is_array()) throw ConfigError("waypoints", "expected an array");
    for (std::size_t t = 0; t < w.size(); ++t) {
      s.waypoints.push_back(parse_target(w[t], "waypoints[" + std::to_string(t) + "]"));
    }
  }
  if (doc.contains("snap_tolerance")) s.snap_tolerance = number(doc["snap_tolerance"], "snap_tolerance");
  if (!(s.snap_tolerance > 0.0)) throw ConfigError("snap_tolerance", "must be > 0");

  if (doc.contains("output")) {
    const json& o = require_object(doc["output"], "output");
    reject_unknown(o, "output", {"path_json", "path_csv", "prune_cache"});
    if (o.contains("path_json")) s.output.path_json = o["path_json"].get<std::string>();
    if (o.contains("path_csv")) s.output.path_csv = o["path_csv"].get<std::string>();
    if (o.contains("prune_cache")) {
      if (!o["prune_cache"].is_boolean()) throw ConfigError("output.prune_cache", "expected a boolean");
      s.output.prune_cache = o["prune_cache"];
    }
  }
  if (doc.contains("threads")) s.threads = static_cast<int>(unsigned_int(doc["threads"], "threads"));
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("$", "cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("$", std::string("invalid JSON: ") + e.what());
  }
  return parse_scenario(doc, path.parent_path());
}

RouteTarget to_route_target(const TargetSpec& spec, const LibraryConfig& lib, std::size_t n_z, double length) {
  switch (spec.kind) {
    case TargetSpec::Kind::Gamma:
      return ShapeTarget{forward_kinematics(lib.map, ActivationVector(spec.value), length, n_z)};
    case TargetSpec::Kind::Tip:
      return TipTarget{spec.value};
    case TargetSpec::Kind::Shape: {
      if (static_cast<std::size_t>(spec.shape.rows()) != n_z) {
        throw ConfigError("shape target", "point count does not match library n_z");
      }
      CenterlineShape s;
      s.points = spec.shape;
      s.arc_params = uniform_arc_params(length, n_z);
      return ShapeTarget{std::move(s)};
    }
  }
  throw ConfigError("target", "unknown kind");
}

}  // namespace ssg
