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

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "ssg/commands.hpp"
#include "ssg/path_export.hpp"
#include "ssg/scenario.hpp"
#include "support/oracles.hpp"

using namespace ssg;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "ssg");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("ssg_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string write_config(const fs::path& dir, const json& doc, const std::string& name = "scenario.json") {
  const fs::path p = dir / name;
  std::ofstream(p) << doc.dump(2);
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json small_scenario() {
  return json{{"schema_version", 1},
              {"name", "small"},
              {"library", {{"n", 400}, {"n_z", 20}, {"seed", 3}}},
              {"graph", {{"k", 6}}},
              {"obstacles", json::array()},
              {"start", {{"gamma", {0, 0, 0}}}},
              {"goal", {{"gamma", {-1.0, -0.4, -0.4}}}},
              {"snap_tolerance", 1.0}};
}

// Runs gen-lib and build-graph for a config.
void prepare(const std::string& cfg) {
  REQUIRE(run({"gen-lib", "--config", cfg}).code == kExitOk);
  REQUIRE(run({"build-graph", "--config", cfg}).code == kExitOk);
}

}  // namespace

TEST_CASE("gen-lib writes N records and a manifest, reproducibly") {
  auto dir = fresh_dir("genlib");
  json doc = small_scenario();
  doc["library"] = {{"n", 100}, {"n_z", 10}, {"seed", 1}};
  auto cfg = write_config(dir, doc);
  auto r = run({"gen-lib", "--config", cfg});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("N=100") != std::string::npos);
  auto manifest = json::parse(slurp(dir / "library.ssgl.json"));
  CHECK(manifest["N"] == 100);
  const auto first = slurp(dir / "library.ssgl");
  CHECK(first.size() == kLibraryHeaderBytes + 100 * (3 + 30) * 8);
  REQUIRE(run({"gen-lib", "--config", cfg}).code == kExitOk);
  CHECK(slurp(dir / "library.ssgl") == first);
  // A different seed from the command line changes the file.
  REQUIRE(run({"gen-lib", "--config", cfg, "--seed", "2"}).code == kExitOk);
  CHECK(slurp(dir / "library.ssgl") != first);
}

TEST_CASE("build-graph on a collinear toy library yields two edges") {
  auto dir = fresh_dir("toy");
  auto lib = test::make_library({test::straight_shape(10), test::straight_shape(10, Vec3(0.1, 0, 0)),
                                 test::straight_shape(10, Vec3(0.3, 0, 0))});
  save_library(lib, (dir / "toy.ssgl").string());
  json doc = small_scenario();
  doc["library"] = {{"path", "toy.ssgl"}, {"n_z", 10}};
  doc["graph"] = {{"path", "toy.ssgg"}, {"k", 1}};
  auto cfg = write_config(dir, doc);
  auto r = run({"build-graph", "--config", cfg});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("edges=2") != std::string::npos);
  CHECK(load_graph((dir / "toy.ssgg").string()).edge_count() == 2);
  const auto first = slurp(dir / "toy.ssgg");
  REQUIRE(run({"build-graph", "--config", cfg}).code == kExitOk);
  CHECK(slurp(dir / "toy.ssgg") == first);
}

TEST_CASE("plan with start equal to goal and no obstacles gives one node") {
  auto dir = fresh_dir("trivial");
  json doc = small_scenario();
  doc["goal"] = doc["start"];
  auto cfg = write_config(dir, doc);
  prepare(cfg);
  auto r = run({"plan", "--config", cfg});
  REQUIRE(r.code == kExitOk);
  auto path = json::parse(slurp(dir / "path.json"));
  CHECK(path["nodes"] == json::array({0}));
  CHECK(path["metrics"]["tip_length"] == 0.0);
  CHECK(path["metrics"]["n_nodes"] == 1);
  CHECK(path.find("search_time") == path.end());
  CHECK(slurp(dir / "path.csv").rfind("step,node,leg,tip_x,tip_y,tip_z,gamma_1,gamma_2,gamma_3\n", 0) == 0);
}

TEST_CASE("plan output is byte-identical across runs and the prune cache hits") {
  auto dir = fresh_dir("determinism");
  json doc = small_scenario();
  doc["obstacles"] = json::array({{{"kind", "sphere"}, {"center", {-0.5, 0.0, 0.5}}, {"dims", {0.08}}}});
  auto cfg = write_config(dir, doc);
  prepare(cfg);
  auto first = run({"plan", "--config", cfg});
  REQUIRE(first.code == kExitOk);
  CHECK(first.out.find("cache=miss") != std::string::npos);
  const auto json1 = slurp(dir / "path.json"), csv1 = slurp(dir / "path.csv");
  auto second = run({"plan", "--config", cfg});
  REQUIRE(second.code == kExitOk);
  CHECK(second.out.find("cache=hit") != std::string::npos);
  CHECK(slurp(dir / "path.json") == json1);
  CHECK(slurp(dir / "path.csv") == csv1);
  // Changing rho invalidates the cache key.
  doc["rho_tube"] = 0.03;
  write_config(dir, doc);
  CHECK(run({"plan", "--config", cfg}).out.find("cache=miss") != std::string::npos);
}

TEST_CASE("obstacle covering the goal region is unreachable") {
  auto dir = fresh_dir("covered");
  json doc = small_scenario();
  doc["goal"] = {{"tip", {-0.2, 0.0, 0.9}}};
  doc["snap_tolerance"] = 0.05;
  doc["obstacles"] = json::array({{{"kind", "sphere"}, {"center", {-0.2, 0.0, 0.9}}, {"dims", {0.3}}}});
  auto cfg = write_config(dir, doc);
  prepare(cfg);
  auto r = run({"plan", "--config", cfg});
  CHECK(r.code == kExitUnreachable);
  CHECK(r.err.find("unreachable") != std::string::npos);
}

TEST_CASE("pruned start is reported with its own exit code") {
  auto dir = fresh_dir("allpruned");
  json doc = small_scenario();
  doc["obstacles"] = json::array({{{"kind", "sphere"}, {"center", {0, 0, 0}}, {"dims", {5.0}}}});
  auto cfg = write_config(dir, doc);
  prepare(cfg);
  CHECK(run({"plan", "--config", cfg}).code == kExitPrunedEndpoint);
}

TEST_CASE("configuration errors name the field") {
  auto dir = fresh_dir("config");
  auto check_field = [&](json doc, const std::string& field) {
    auto cfg = write_config(dir, doc);
    auto r = run({"gen-lib", "--config", cfg});
    CHECK(r.code == kExitConfig);
    CHECK_MESSAGE(r.err.find(field) != std::string::npos, r.err);
  };
  json doc = small_scenario();
  doc["library"]["n"] = -5;
  check_field(doc, "library.n");
  doc = small_scenario();
  doc["costs"] = {{"alpha", 0.0}};
  check_field(doc, "costs.alpha");
  doc = small_scenario();
  doc["costs"] = {{"K", {{1, 0, 0}, {0, -1, 0}, {0, 0, 1}}}};
  check_field(doc, "costs.K");
  doc = small_scenario();
  doc["obstacles"] = json::array({{{"kind", "box"}, {"center", {0, 0, 0}}, {"dims", {1, 1}}}});
  check_field(doc, "obstacles[0].dims");
  doc = small_scenario();
  doc["obstacles"] = json::array({{{"kind", "cone"}, {"center", {0, 0, 0}}, {"dims", {1}}}});
  check_field(doc, "obstacles[0].kind");
  doc = small_scenario();
  doc["start"] = {{"gamma", {0.5, 0, 0}}};
  check_field(doc, "start.gamma");
  doc = small_scenario();
  doc["graph"]["kk"] = 3;
  check_field(doc, "graph.kk");
  doc = small_scenario();
  doc["rho_tube"] = 0.0;
  check_field(doc, "rho_tube");
  doc = small_scenario();
  doc["sweep_steps"] = 0;
  check_field(doc, "sweep_steps");
  doc = small_scenario();
  doc["schema_version"] = 2;
  check_field(doc, "schema_version");

  auto missing = run({"gen-lib", "--config", (dir / "nope.json").string()});
  CHECK(missing.code != kExitOk);
  CHECK(run({"frobnicate"}).code == kExitConfig);
}

TEST_CASE("k not below N is a configuration error") {
  auto dir = fresh_dir("kn");
  json doc = small_scenario();
  doc["library"] = {{"n", 10}, {"n_z", 5}};
  doc["graph"] = {{"k", 10}};
  auto cfg = write_config(dir, doc);
  REQUIRE(run({"gen-lib", "--config", cfg}).code == kExitOk);
  auto r = run({"build-graph", "--config", cfg});
  CHECK(r.code == kExitConfig);
  CHECK(r.err.find("graph.k") != std::string::npos);
}

TEST_CASE("io failures and stale graphs map to the io exit code") {
  auto dir = fresh_dir("io");
  json doc = small_scenario();
  auto cfg = write_config(dir, doc);
  CHECK(run({"build-graph", "--config", cfg}).code == kExitIo);
  prepare(cfg);
  // Regenerate the library with a new seed: the graph now refers to stale data.
  REQUIRE(run({"gen-lib", "--config", cfg, "--seed", "77"}).code == kExitOk);
  auto r = run({"plan", "--config", cfg});
  CHECK(r.code == kExitIo);
  CHECK(r.err.find("different library") != std::string::npos);
}

TEST_CASE("compare prints one column per weight set and the deltas") {
  auto dir = fresh_dir("compare");
  json doc = small_scenario();
  auto cfg = write_config(dir, doc);
  prepare(cfg);
  auto r = run({"compare", "--config", cfg});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("SDF only") != std::string::npos);
  CHECK(r.out.find("SDF + energy") != std::string::npos);
  CHECK(r.out.find("delta 1") != std::string::npos);
  CHECK(r.out.find("E_gamma") != std::string::npos);
  CHECK(fs::exists(dir / "path_0.json"));
  CHECK(fs::exists(dir / "path_1.csv"));

  doc["compare"] = json::array({{{"name", "only"}, {"alpha", 1.0}}});
  write_config(dir, doc);
  auto single = run({"compare", "--config", cfg});
  REQUIRE(single.code == kExitOk);
  CHECK(single.out.find("delta") == std::string::npos);
}

TEST_CASE("comparison table formats percentage deltas") {
  PlanOutcome a, b;
  a.label = "geo";
  b.label = "energy";
  a.metrics = {0.2, 10.0, 2.0, 40, 0.5};
  b.metrics = {0.3, 5.0, 1.0, 50, 0.5};
  auto table = format_comparison_table({a, b});
  CHECK(table.find("+50.00 %") != std::string::npos);
  CHECK(table.find("-50.00 %") != std::string::npos);
  CHECK(table.find("+25.00 %") != std::string::npos);
  CHECK(table.find("+0.00 %") != std::string::npos);
}

TEST_CASE("scenario parsing resolves defaults and relative paths") {
  auto dir = fresh_dir("parse");
  json doc = {{"schema_version", 1}, {"start", {{"tip", {0, 0, 1}}}}, {"goal", {{"gamma", {0, 0, 0}}}}};
  auto s = parse_scenario(doc, dir);
  CHECK(s.library.n == 1000);
  CHECK(s.graph.k == 20);
  CHECK(s.rho_tube == 0.02);
  CHECK(s.sweep_steps == 5);
  CHECK(s.clearance_margin == 0.0);
  CHECK(s.compare.size() == 2);
  CHECK(s.resolve("library.ssgl") == dir / "library.ssgl");
  CHECK(s.resolve("/abs/x") == fs::path("/abs/x"));
  REQUIRE(s.start.has_value());
  CHECK(s.start->kind == TargetSpec::Kind::Tip);
}

TEST_CASE("shipped scenarios parse") {
  for (const char* name : {"box_desk.json", "two_cylinders.json"}) {
    CHECK_NOTHROW(load_scenario(fs::path(SSG_SCENARIO_DIR) / name));
  }
}
