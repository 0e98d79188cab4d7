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

#include "ssg/knn_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "binary_io.hpp"

namespace ssg {

// ---------------------------------------------------------------------------
// ShapeGraph

ShapeGraph ShapeGraph::from_edges(std::size_t n, std::vector<Edge> edges, std::uint32_t k,
                                  const Digest& library_digest) {
  if (n > std::numeric_limits<NodeId>::max()) throw std::invalid_argument("graph: too many nodes");
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const Edge& ed = edges[e];
    if (!(ed.i < ed.j) || ed.j >= n) throw std::invalid_argument("graph: edge endpoints must satisfy i < j < N");
    if (!(ed.d_rms >= 0.0)) throw std::invalid_argument("graph: negative or NaN edge distance");
    if (e > 0 && edges[e - 1].i == ed.i && edges[e - 1].j == ed.j) {
      throw std::invalid_argument("graph: duplicate edge");
    }
  }

  ShapeGraph g;
  g.k_ = k;
  g.library_digest_ = library_digest;
  g.edges_ = std::move(edges);
  g.offsets_.assign(n + 1, 0);
  for (const Edge& e : g.edges_) {
    ++g.offsets_[e.i + 1];
    ++g.offsets_[e.j + 1];
  }
  std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
  g.adjacency_.resize(2 * g.edges_.size());
  std::vector<std::uint64_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (EdgeId id = 0; id < g.edges_.size(); ++id) {
    const Edge& e = g.edges_[id];
    g.adjacency_[cursor[e.i]++] = AdjEntry{e.j, id};
    g.adjacency_[cursor[e.j]++] = AdjEntry{e.i, id};
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i]),
              g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i + 1]),
              [](const AdjEntry& a, const AdjEntry& b) { return a.neighbor < b.neighbor; });
  }
  g.reset_alive();
  return g;
}

void ShapeGraph::reset_alive() {
  node_alive_.assign(node_count(), 1);
  edge_alive_.assign(edges_.size(), 1);
}

void ShapeGraph::set_alive_masks(std::vector<std::uint8_t> nodes, std::vector<std::uint8_t> edges) {
  if (nodes.size() != node_count() || edges.size() != edge_count()) {
    throw std::invalid_argument("graph: alive mask size mismatch");
  }
  node_alive_ = std::move(nodes);
  edge_alive_ = std::move(edges);
}

std::size_t ShapeGraph::alive_node_count() const {
  return static_cast<std::size_t>(std::count(node_alive_.begin(), node_alive_.end(), 1));
}

std::size_t ShapeGraph::alive_edge_count() const {
  return static_cast<std::size_t>(std::count(edge_alive_.begin(), edge_alive_.end(), 1));
}

std::optional<EdgeId> ShapeGraph::find_edge(NodeId a, NodeId b) const {
  if (a >= node_count() || b >= node_count()) return std::nullopt;
  auto nb = neighbors(a);
  auto it = std::lower_bound(nb.begin(), nb.end(), b, [](const AdjEntry& x, NodeId v) { return x.neighbor < v; });
  if (it == nb.end() || it->neighbor != b) return std::nullopt;
  return it->edge;
}

void ShapeGraph::check_invariants() const {
  const std::size_t n = node_count();
  for (NodeId i = 0; i < n; ++i) {
    auto nb = neighbors(i);
    for (std::size_t t = 0; t < nb.size(); ++t) {
      const AdjEntry& a = nb[t];
      if (a.neighbor == i) throw std::logic_error("graph: self-loop");
      if (t > 0 && nb[t - 1].neighbor >= a.neighbor) throw std::logic_error("graph: unsorted or duplicate neighbours");
      const Edge& e = edges_.at(a.edge);
      if (std::min(i, a.neighbor) != e.i || std::max(i, a.neighbor) != e.j) {
        throw std::logic_error("graph: adjacency entry does not match edge list");
      }
      auto back = neighbors(a.neighbor);
      auto it = std::lower_bound(back.begin(), back.end(), i,
                                 [](const AdjEntry& x, NodeId v) { return x.neighbor < v; });
      if (it == back.end() || it->neighbor != i || it->edge != a.edge) throw std::logic_error("graph: asymmetric adjacency");
    }
  }
}

// ---------------------------------------------------------------------------
// Distances

double rms_distance(std::span<const double> a, std::span<const double> b, std::size_t n_z) {
  double sum = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    const double d = a[t] - b[t];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(n_z));
}

double shape_distance(const CenterlineShape& a, const CenterlineShape& b) {
  if (a.n_z() != b.n_z()) {
    throw ShapeMismatchError("shape_distance: n_z mismatch (" + std::to_string(a.n_z()) + " vs " +
                             std::to_string(b.n_z()) + ")");
  }
  const auto n = static_cast<std::size_t>(a.points.size());
  return rms_distance(std::span<const double>(a.points.data(), n), std::span<const double>(b.points.data(), n),
                      a.n_z());
}

// ---------------------------------------------------------------------------
// Exact k-NN
//
// A GEMM pass on mean-centred records computes approximate squared distances
// |x|^2 + |y|^2 - 2 x.y and keeps the best (k + extra) per node. With tol a
// bound on the approximation error, every true k-NN member has approximate
// value <= A_k + 2 tol where A_k is the k-th smallest approximate value. If the
// pool's worst entry lies beyond that threshold the pool provably contains all
// true members and exact re-ranking over it is exact; otherwise the node falls
// back to a full exact scan.

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Candidate {
  double d2;
  NodeId idx;
  bool operator<(const Candidate& o) const { return d2 != o.d2 ? d2 < o.d2 : idx < o.idx; }
};

// Bounded max-heap keeping the `cap` smallest candidates.
class CandidatePool {
 public:
  CandidatePool(Candidate* storage, std::size_t cap) : data_(storage), cap_(cap) {}

  void offer(double d2, NodeId idx) {
    Candidate c{d2, idx};
    if (size_ < cap_) {
      data_[size_++] = c;
      std::push_heap(data_, data_ + size_);
    } else if (c < data_[0]) {
      std::pop_heap(data_, data_ + size_);
      data_[size_ - 1] = c;
      std::push_heap(data_, data_ + size_);
    }
  }
  // Fast reject once full.
  double bound() const { return size_ < cap_ ? std::numeric_limits<double>::infinity() : data_[0].d2; }
  std::size_t size() const { return size_; }
  Candidate* begin() { return data_; }
  Candidate* end() { return data_ + size_; }

 private:
  Candidate* data_;
  std::size_t cap_;
  std::size_t size_ = 0;
};

// Circle-method round robin: each round is a set of disjoint block pairs.
std::vector<std::vector<std::pair<std::size_t, std::size_t>>> block_rounds(std::size_t blocks) {
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> rounds;
  std::vector<std::pair<std::size_t, std::size_t>> diag;
  for (std::size_t b = 0; b < blocks; ++b) diag.emplace_back(b, b);
  rounds.push_back(std::move(diag));
  const std::size_t m = blocks + (blocks % 2);  // pad with a dummy block
  if (m < 2) return rounds;
  std::vector<std::size_t> ring(m);
  std::iota(ring.begin(), ring.end(), 0);
  for (std::size_t r = 0; r + 1 < m; ++r) {
    std::vector<std::pair<std::size_t, std::size_t>> round;
    for (std::size_t p = 0; p < m / 2; ++p) {
      std::size_t a = ring[p], b = ring[m - 1 - p];
      if (a < blocks && b < blocks) round.emplace_back(std::min(a, b), std::max(a, b));
    }
    rounds.push_back(std::move(round));
    std::rotate(ring.begin() + 1, ring.end() - 1, ring.end());
  }
  return rounds;
}

std::vector<NodeId> exact_scan(const ShapeLibrary& lib, NodeId q, std::size_t k) {
  const std::size_t n = lib.size();
  std::vector<std::pair<double, NodeId>> all;
  all.reserve(n - 1);
  for (NodeId j = 0; j < n; ++j) {
    if (j == q) continue;
    all.emplace_back(rms_distance(lib.record(q), lib.record(j), lib.n_z()), j);
  }
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end());
  std::vector<NodeId> out(k);
  for (std::size_t t = 0; t < k; ++t) out[t] = all[t].second;
  return out;
}

}  // namespace

std::vector<std::vector<NodeId>> exact_knn(const ShapeLibrary& lib, std::size_t k, const KnnOptions& opts) {
  const std::size_t n = lib.size();
  if (k < 1) throw std::invalid_argument("build_knn_graph: k must be >= 1");
  if (k >= n) {
    throw std::invalid_argument("build_knn_graph: k must be < N (k=" + std::to_string(k) +
                                ", N=" + std::to_string(n) + ")");
  }
  const std::size_t dim = lib.record_dim();
  const std::size_t pool_cap = std::min(n - 1, k + opts.extra_candidates);
  const std::size_t block = std::max<std::size_t>(1, opts.block_rows);

  // Mean-centred copy keeps |x|^2 small, which tightens the error bound.
  Eigen::Map<const RowMatrix> raw(lib.flat_points().data(), static_cast<Eigen::Index>(n),
                                  static_cast<Eigen::Index>(dim));
  const Eigen::RowVectorXd mean = raw.colwise().mean();
  RowMatrix x = raw.rowwise() - mean;
  const Eigen::VectorXd norms = x.rowwise().squaredNorm();
  const double max_norm = norms.maxCoeff();
  const double unit_roundoff = std::numeric_limits<double>::epsilon() / 2.0;
  const double tol_scale = 16.0 * static_cast<double>(dim + 4) * unit_roundoff;

  std::vector<Candidate> storage(n * pool_cap);
  std::vector<CandidatePool> pools;
  pools.reserve(n);
  for (std::size_t i = 0; i < n; ++i) pools.emplace_back(storage.data() + i * pool_cap, pool_cap);

  const std::size_t blocks = (n + block - 1) / block;
  for (const auto& round : block_rounds(blocks)) {
#pragma omp parallel
    {
      Eigen::MatrixXd gram;
#pragma omp for schedule(dynamic, 1)
      for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(round.size()); ++t) {
        const auto [ba, bb] = round[static_cast<std::size_t>(t)];
        const std::size_t a0 = ba * block, a1 = std::min(n, a0 + block);
        const std::size_t b0 = bb * block, b1 = std::min(n, b0 + block);
        const auto na = static_cast<Eigen::Index>(a1 - a0), nb = static_cast<Eigen::Index>(b1 - b0);
        gram.resize(na, nb);
        gram.noalias() = x.middleRows(static_cast<Eigen::Index>(a0), na) *
                         x.middleRows(static_cast<Eigen::Index>(b0), nb).transpose();
        const bool diagonal = ba == bb;
        for (Eigen::Index q = 0; q < nb; ++q) {
          const auto jq = static_cast<NodeId>(b0 + static_cast<std::size_t>(q));
          CandidatePool& pool_q = pools[jq];
          const double nq = norms[jq];
          const double* col = gram.data() + q * na;
          for (Eigen::Index p = 0; p < na; ++p) {
            const auto ip = static_cast<NodeId>(a0 + static_cast<std::size_t>(p));
            if (diagonal && ip >= jq) continue;
            const double d2 = norms[ip] + nq - 2.0 * col[p];
            if (d2 <= pools[ip].bound()) pools[ip].offer(d2, jq);
            if (d2 <= pool_q.bound()) pool_q.offer(d2, ip);
          }
        }
      }
    }
  }

  std::vector<std::vector<NodeId>> result(n);
#pragma omp parallel for schedule(dynamic, 256)
  for (std::ptrdiff_t si = 0; si < static_cast<std::ptrdiff_t>(n); ++si) {
    const auto i = static_cast<NodeId>(si);
    CandidatePool& pool = pools[i];
    std::sort(pool.begin(), pool.end());
    std::vector<std::pair<double, NodeId>> exact;
    bool complete = pool.size() == n - 1;
    double threshold = std::numeric_limits<double>::infinity();
    if (!complete) {
      const double tol = tol_scale * (norms[i] + max_norm);
      threshold = pool.begin()[k - 1].d2 + 2.0 * tol;
      if (!(pool.begin()[pool.size() - 1].d2 > threshold)) {
        result[i] = exact_scan(lib, i, k);
        continue;
      }
    }
    for (const Candidate& c : pool) {
      if (c.d2 > threshold) break;
      exact.emplace_back(rms_distance(lib.record(i), lib.record(c.idx), lib.n_z()), c.idx);
    }
    std::sort(exact.begin(), exact.end());
    result[i].resize(k);
    for (std::size_t t = 0; t < k; ++t) result[i][t] = exact[t].second;
  }
  return result;
}

ShapeGraph build_knn_graph(const ShapeLibrary& lib, std::size_t k, const KnnOptions& opts) {
  return build_knn_graph(lib, k, library_digest(lib), opts);
}

ShapeGraph build_knn_graph(const ShapeLibrary& lib, std::size_t k, const Digest& lib_digest,
                           const KnnOptions& opts) {
  const auto knn = exact_knn(lib, k, opts);
  std::vector<std::pair<NodeId, NodeId>> pairs;
  pairs.reserve(lib.size() * k);
  for (NodeId i = 0; i < knn.size(); ++i) {
    for (NodeId j : knn[i]) pairs.emplace_back(std::min(i, j), std::max(i, j));
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  std::vector<Edge> edges(pairs.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t e = 0; e < static_cast<std::ptrdiff_t>(pairs.size()); ++e) {
    const auto [i, j] = pairs[static_cast<std::size_t>(e)];
    edges[static_cast<std::size_t>(e)] = Edge{i, j, rms_distance(lib.record(i), lib.record(j), lib.n_z())};
  }
  return ShapeGraph::from_edges(lib.size(), std::move(edges), static_cast<std::uint32_t>(k), lib_digest);
}

// ---------------------------------------------------------------------------
// Snapping

namespace {

template <typename DistanceFn>
NodeId argmin_alive(std::size_t n, std::span<const std::uint8_t> alive, DistanceFn&& dist) {
  if (!alive.empty() && alive.size() != n) throw std::invalid_argument("nearest_node: alive mask size mismatch");
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_idx = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (!alive.empty() && alive[i] == 0) continue;
    const double d = dist(i);
    if (d < best || best_idx == n) {
      best = d;
      best_idx = i;
    }
  }
  if (best_idx == n) throw NoAliveNodeError("nearest_node: all nodes are pruned");
  return static_cast<NodeId>(best_idx);
}

}  // namespace

NodeId nearest_node(const ShapeLibrary& lib, const CenterlineShape& query, std::span<const std::uint8_t> alive) {
  if (lib.size() == 0) throw std::invalid_argument("nearest_node: empty library");
  if (query.n_z() != lib.n_z()) throw ShapeMismatchError("nearest_node: query n_z does not match the library");
  std::span<const double> q(query.points.data(), static_cast<std::size_t>(query.points.size()));
  return argmin_alive(lib.size(), alive, [&](std::size_t i) { return rms_distance(q, lib.record(i), lib.n_z()); });
}

NodeId nearest_node_by_tip(const ShapeLibrary& lib, const Vec3& point, std::span<const std::uint8_t> alive) {
  if (lib.size() == 0) throw std::invalid_argument("nearest_node: empty library");
  return argmin_alive(lib.size(), alive, [&](std::size_t i) { return (lib.tip(i) - point).norm(); });
}

// ---------------------------------------------------------------------------
// Graph file

std::vector<std::byte> serialize_graph(const ShapeGraph& g) {
  io::Writer w;
  const std::size_t m = g.adjacency().size();
  w.reserve(64 + (g.node_count() + 1) * 8 + m * 12);
  w.tag("SSGG");
  w.u32(kGraphFormatVersion);
  w.u64(g.node_count());
  w.u32(g.k());
  w.bytes(g.library_digest().data(), g.library_digest().size());
  w.u64(m);
  w.array(std::span<const std::uint64_t>(g.offsets()));
  std::vector<std::uint32_t> nbr(m);
  std::vector<double> wts(m);
  for (std::size_t t = 0; t < m; ++t) {
    nbr[t] = g.adjacency()[t].neighbor;
    wts[t] = g.edges()[g.adjacency()[t].edge].d_rms;
  }
  w.array(std::span<const std::uint32_t>(nbr));
  w.array(std::span<const double>(wts));
  return std::move(w.buffer());
}

ShapeGraph deserialize_graph(std::span<const std::byte> bytes) {
  using Kind = GraphFormatError::Kind;
  constexpr std::size_t kHeader = 4 + 4 + 8 + 4 + 32 + 8;
  io::Reader r(bytes);
  if (r.remaining() < kHeader) throw GraphFormatError(Kind::MalformedHeader, "graph: malformed header (short file)");
  if (!r.tag_equals("SSGG")) throw GraphFormatError(Kind::MalformedHeader, "graph: malformed header (bad magic)");
  if (r.u32() != kGraphFormatVersion) throw GraphFormatError(Kind::MalformedHeader, "graph: unsupported version");
  const std::uint64_t n = r.u64();
  const std::uint32_t k = r.u32();
  Digest digest{};
  r.bytes(digest.data(), digest.size());
  const std::uint64_t m = r.u64();
  if (n > std::numeric_limits<NodeId>::max() || m % 2 != 0) {
    throw GraphFormatError(Kind::MalformedHeader, "graph: malformed header (invalid sizes)");
  }
  if (r.remaining() < (n + 1) * 8 || (r.remaining() - (n + 1) * 8) / 12 < m) {
    throw GraphFormatError(Kind::Truncated, "graph: truncated arrays");
  }
  if (r.remaining() != (n + 1) * 8 + m * 12) throw GraphFormatError(Kind::MalformedHeader, "graph: trailing bytes");
  std::vector<std::uint64_t> offsets(n + 1);
  std::vector<std::uint32_t> nbr(m);
  std::vector<double> wts(m);
  r.array(std::span<std::uint64_t>(offsets));
  r.array(std::span<std::uint32_t>(nbr));
  r.array(std::span<double>(wts));
  if (offsets.front() != 0 || offsets.back() != m) throw GraphFormatError(Kind::Inconsistent, "graph: bad offsets");

  std::vector<Edge> edges;
  edges.reserve(m / 2);
  for (NodeId i = 0; i < n; ++i) {
    if (offsets[i] > offsets[i + 1]) throw GraphFormatError(Kind::Inconsistent, "graph: non-monotone offsets");
    for (std::uint64_t t = offsets[i]; t < offsets[i + 1]; ++t) {
      if (nbr[t] >= n) throw GraphFormatError(Kind::Inconsistent, "graph: neighbour out of range");
      if (i < nbr[t]) edges.push_back(Edge{i, nbr[t], wts[t]});
    }
  }
  if (edges.size() * 2 != m) throw GraphFormatError(Kind::Inconsistent, "graph: adjacency is not symmetric");
  ShapeGraph g;
  try {
    g = ShapeGraph::from_edges(n, std::move(edges), k, digest);
    g.check_invariants();
  } catch (const std::exception& e) {
    throw GraphFormatError(Kind::Inconsistent, std::string("graph: ") + e.what());
  }
  // Weights must agree in both directions.
  for (NodeId i = 0; i < n; ++i) {
    auto nb = g.neighbors(i);
    for (std::size_t t = 0; t < nb.size(); ++t) {
      if (wts[offsets[i] + t] != g.edges()[nb[t].edge].d_rms) {
        throw GraphFormatError(Kind::Inconsistent, "graph: asymmetric edge weights");
      }
    }
  }
  return g;
}

void save_graph(const ShapeGraph& g, const std::string& path) {
  if (!io::write_file(path, serialize_graph(g))) {
    throw GraphFormatError(GraphFormatError::Kind::Io, "graph: cannot write " + path);
  }
}

ShapeGraph load_graph(const std::string& path) {
  std::vector<std::byte> bytes;
  if (!io::read_file(path, bytes)) throw GraphFormatError(GraphFormatError::Kind::Io, "graph: cannot read " + path);
  return deserialize_graph(bytes);
}

Digest graph_digest(const ShapeGraph& g) { return sha256(serialize_graph(g)); }

}  // namespace ssg
