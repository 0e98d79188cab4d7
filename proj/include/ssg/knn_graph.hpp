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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssg/digest.hpp"
#include "ssg/rod_model.hpp"
#include "ssg/shape_library.hpp"

namespace ssg {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

struct Edge {
  NodeId i;  // i < j
  NodeId j;
  double d_rms;
};

struct AdjEntry {
  NodeId neighbor;
  EdgeId edge;
};

// Undirected graph in CSR form. Geometry (d_rms) is fixed at build time; the
// node/edge alive flags are per-scenario state written by pruning.
class ShapeGraph {
 public:
  ShapeGraph() = default;

  // Edges must satisfy i < j < n with no duplicates; they are sorted by (i, j).
  static ShapeGraph from_edges(std::size_t n, std::vector<Edge> edges, std::uint32_t k = 0,
                               const Digest& library_digest = {});

  std::size_t node_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const { return edges_.size(); }
  std::uint32_t k() const { return k_; }
  const Digest& library_digest() const { return library_digest_; }

  const std::vector<Edge>& edges() const { return edges_; }
  std::span<const AdjEntry> neighbors(NodeId i) const {
    return std::span<const AdjEntry>(adjacency_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
  }
  std::size_t degree(NodeId i) const { return offsets_[i + 1] - offsets_[i]; }
  std::optional<EdgeId> find_edge(NodeId a, NodeId b) const;
  const std::vector<std::uint64_t>& offsets() const { return offsets_; }
  const std::vector<AdjEntry>& adjacency() const { return adjacency_; }

  bool node_alive(NodeId i) const { return node_alive_[i] != 0; }
  bool edge_alive(EdgeId e) const { return edge_alive_[e] != 0; }
  std::span<const std::uint8_t> node_alive_mask() const { return node_alive_; }
  std::span<const std::uint8_t> edge_alive_mask() const { return edge_alive_; }
  void set_node_alive(NodeId i, bool alive) { node_alive_[i] = alive ? 1 : 0; }
  void set_edge_alive(EdgeId e, bool alive) { edge_alive_[e] = alive ? 1 : 0; }
  void set_alive_masks(std::vector<std::uint8_t> nodes, std::vector<std::uint8_t> edges);
  void reset_alive();
  std::size_t alive_node_count() const;
  std::size_t alive_edge_count() const;

  // Throws std::logic_error if symmetry, ordering or self-loop invariants fail.
  void check_invariants() const;

 private:
  std::uint32_t k_ = 0;
  Digest library_digest_{};
  std::vector<Edge> edges_;
  std::vector<std::uint64_t> offsets_;
  std::vector<AdjEntry> adjacency_;
  std::vector<std::uint8_t> node_alive_;
  std::vector<std::uint8_t> edge_alive_;
};

class ShapeMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// sqrt( (1/n_z) * sum_k sum_j (A_kj - B_kj)^2 )
double shape_distance(const CenterlineShape& a, const CenterlineShape& b);
// Same metric on flattened row-major records of n_z * 3 values.
double rms_distance(std::span<const double> a, std::span<const double> b, std::size_t n_z);

struct KnnOptions {
  std::size_t block_rows = 1024;
  // Candidates kept per node beyond k before exact re-ranking.
  std::size_t extra_candidates = 8;
};

// Exact k nearest neighbours of every node (self excluded), ordered by
// (distance, index).
std::vector<std::vector<NodeId>> exact_knn(const ShapeLibrary& lib, std::size_t k, const KnnOptions& opts = {});

// Symmetric union of the k-NN relation.
ShapeGraph build_knn_graph(const ShapeLibrary& lib, std::size_t k, const KnnOptions& opts = {});
ShapeGraph build_knn_graph(const ShapeLibrary& lib, std::size_t k, const Digest& library_digest,
                           const KnnOptions& opts = {});

class NoAliveNodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argmin of shape_distance over nodes (alive ones if a mask is given), lowest index on ties.
NodeId nearest_node(const ShapeLibrary& lib, const CenterlineShape& query,
                    std::span<const std::uint8_t> alive = {});
// Argmin of Euclidean tip distance, same conventions.
NodeId nearest_node_by_tip(const ShapeLibrary& lib, const Vec3& point, std::span<const std::uint8_t> alive = {});

class GraphFormatError : public std::runtime_error {
 public:
  enum class Kind { Io, MalformedHeader, Truncated, Inconsistent, DigestMismatch };
  GraphFormatError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

inline constexpr std::uint32_t kGraphFormatVersion = 1;

std::vector<std::byte> serialize_graph(const ShapeGraph& g);
ShapeGraph deserialize_graph(std::span<const std::byte> bytes);
void save_graph(const ShapeGraph& g, const std::string& path);
ShapeGraph load_graph(const std::string& path);
Digest graph_digest(const ShapeGraph& g);

}  // namespace ssg
