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

#include "ssg/shape_library.hpp"

#include <exception>
#include <random>

#include <json.hpp>

#include "binary_io.hpp"

namespace ssg {

FilamentShapeSource::FilamentShapeSource(ActuationMap map, double length)
    : map_(std::move(map)), length_(length) {
  if (!(length > 0.0)) throw RodModelError("shape source: length must be > 0");
}

CenterlineShape FilamentShapeSource::shape(const ActivationVector& gamma, std::size_t n_z) const {
  return forward_kinematics(map_, gamma, length_, n_z);
}

ShapeLibrary::ShapeLibrary(LibraryMeta meta, std::vector<Vec3> gammas, std::vector<double> points)
    : meta_(meta), gammas_(std::move(gammas)), points_(std::move(points)) {
  if (meta_.n != gammas_.size()) throw std::invalid_argument("shape library: N does not match entry count");
  if (meta_.n_z < 2) throw std::invalid_argument("shape library: n_z must be >= 2");
  if (points_.size() != gammas_.size() * record_dim()) {
    throw std::invalid_argument("shape library: point buffer size mismatch");
  }
}

ShapeView ShapeLibrary::shape_view(std::size_t i) const {
  return ShapeView(points_.data() + i * record_dim(), static_cast<Eigen::Index>(meta_.n_z), 3);
}

CenterlineShape ShapeLibrary::shape(std::size_t i) const {
  CenterlineShape s;
  s.points = shape_view(i);
  s.arc_params = uniform_arc_params(meta_.length, meta_.n_z);
  return s;
}

Vec3 ShapeLibrary::tip(std::size_t i) const {
  const double* p = points_.data() + (i + 1) * record_dim() - 3;
  return Vec3(p[0], p[1], p[2]);
}

std::span<const double> ShapeLibrary::record(std::size_t i) const {
  return std::span<const double>(points_).subspan(i * record_dim(), record_dim());
}

bool ShapeLibrary::operator==(const ShapeLibrary& o) const {
  return meta_.n == o.meta_.n && meta_.n_z == o.meta_.n_z && meta_.length == o.meta_.length &&
         meta_.seed == o.meta_.seed && meta_.map_digest == o.meta_.map_digest && gammas_ == o.gammas_ &&
         points_ == o.points_;
}

std::vector<ActivationVector> sample_activations(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<ActivationVector> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vec3 g;
    for (int c = 0; c < 3; ++c) g[c] = kGammaMin + (kGammaMax - kGammaMin) * unit();
    out.emplace_back(g);
  }
  return out;
}

ShapeLibrary library_from_activations(const ShapeSource& source, std::span<const ActivationVector> gammas,
                                      std::size_t n_z, std::uint64_t seed) {
  if (gammas.empty()) throw std::invalid_argument("generate_library: n must be >= 1");
  if (n_z < 2) throw std::invalid_argument("generate_library: n_z must be >= 2");
  const std::size_t n = gammas.size();
  const std::size_t dim = 3 * n_z;
  std::vector<Vec3> g(n);
  std::vector<double> points(n * dim);

  // Lowest failing index wins so the reported error does not depend on scheduling.
  std::ptrdiff_t failed = -1;
  std::string failure;
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    const auto& gamma = gammas[static_cast<std::size_t>(i)];
    try {
      CenterlineShape s = source.shape(gamma, n_z);
      if (s.n_z() != n_z || !s.points.allFinite()) throw std::runtime_error("shape source returned an invalid shape");
      std::copy(s.points.data(), s.points.data() + dim, points.begin() + i * static_cast<std::ptrdiff_t>(dim));
      g[static_cast<std::size_t>(i)] = gamma.value;
    } catch (const std::exception& e) {
#pragma omp critical(ssg_generate_failure)
      if (failed < 0 || i < failed) {
        failed = i;
        failure = e.what();
      }
    }
  }
  if (failed >= 0) {
    const Vec3& bad = gammas[static_cast<std::size_t>(failed)].value;
    throw ShapeSourceError("shape source failed for entry " + std::to_string(failed) + " gamma=(" +
                               std::to_string(bad[0]) + ", " + std::to_string(bad[1]) + ", " +
                               std::to_string(bad[2]) + "): " + failure,
                           bad, static_cast<std::size_t>(failed));
  }

  LibraryMeta meta;
  meta.n = n;
  meta.n_z = static_cast<std::uint32_t>(n_z);
  meta.length = source.length();
  meta.seed = seed;
  meta.map_digest = source.digest();
  return ShapeLibrary(meta, std::move(g), std::move(points));
}

ShapeLibrary generate_library(const ShapeSource& source, std::size_t n, std::size_t n_z, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("generate_library: n must be >= 1");
  std::vector<ActivationVector> gammas;
  gammas.reserve(n);
  gammas.emplace_back(0.0, 0.0, 0.0);
  auto sampled = sample_activations(n - 1, seed);
  gammas.insert(gammas.end(), sampled.begin(), sampled.end());
  return library_from_activations(source, gammas, n_z, seed);
}

std::vector<std::byte> serialize_library(const ShapeLibrary& lib) {
  io::Writer w;
  const std::size_t record_doubles = 3 + lib.record_dim();
  w.reserve(kLibraryHeaderBytes + lib.size() * record_doubles * sizeof(double));
  const auto& m = lib.meta();
  w.tag("SSGL");
  w.u32(kLibraryFormatVersion);
  w.u64(m.n);
  w.u32(m.n_z);
  w.f64(m.length);
  w.u64(m.seed);
  w.bytes(m.map_digest.data(), m.map_digest.size());
  for (std::size_t i = 0; i < lib.size(); ++i) {
    const Vec3& g = lib.gamma(i);
    w.f64(g[0]);
    w.f64(g[1]);
    w.f64(g[2]);
    w.array(lib.record(i));
  }
  return std::move(w.buffer());
}

ShapeLibrary deserialize_library(std::span<const std::byte> bytes, std::optional<std::size_t> expected_n_z) {
  using Kind = LibraryFormatError::Kind;
  io::Reader r(bytes);
  if (r.remaining() < kLibraryHeaderBytes) {
    throw LibraryFormatError(Kind::MalformedHeader, "library: malformed header (file shorter than header)");
  }
  if (!r.tag_equals("SSGL")) throw LibraryFormatError(Kind::MalformedHeader, "library: malformed header (bad magic)");
  LibraryMeta m;
  std::uint32_t version = r.u32();
  if (version != kLibraryFormatVersion) {
    throw LibraryFormatError(Kind::MalformedHeader,
                             "library: malformed header (unsupported version " + std::to_string(version) + ")");
  }
  m.n = r.u64();
  m.n_z = r.u32();
  m.length = r.f64();
  m.seed = r.u64();
  r.bytes(m.map_digest.data(), m.map_digest.size());
  if (m.n_z < 2 || !(m.length > 0.0)) {
    throw LibraryFormatError(Kind::MalformedHeader, "library: malformed header (invalid n_z or length)");
  }
  if (expected_n_z && *expected_n_z != m.n_z) {
    throw LibraryFormatError(Kind::NzMismatch, "library: n_z mismatch (file has " + std::to_string(m.n_z) +
                                                   ", expected " + std::to_string(*expected_n_z) + ")");
  }
  const std::size_t dim = 3 * static_cast<std::size_t>(m.n_z);
  const std::size_t record_bytes = (3 + dim) * sizeof(double);
  if (m.n > r.remaining() / record_bytes) {
    throw LibraryFormatError(Kind::TruncatedRecords, "library: truncated records (header declares " +
                                                         std::to_string(m.n) + " records, file holds " +
                                                         std::to_string(r.remaining() / record_bytes) + ")");
  }
  if (r.remaining() != m.n * record_bytes) {
    throw LibraryFormatError(Kind::MalformedHeader, "library: trailing bytes after the declared records");
  }
  std::vector<Vec3> gammas(m.n);
  std::vector<double> points(m.n * dim);
  for (std::size_t i = 0; i < m.n; ++i) {
    for (int c = 0; c < 3; ++c) gammas[i][c] = r.f64();
    r.array(std::span<double>(points).subspan(i * dim, dim));
  }
  return ShapeLibrary(m, std::move(gammas), std::move(points));
}

Digest library_digest(const ShapeLibrary& lib) { return sha256(serialize_library(lib)); }

std::string manifest_path(const std::string& library_path) { return library_path + ".json"; }

void save_library(const ShapeLibrary& lib, const std::string& path) {
  auto bytes = serialize_library(lib);
  if (!io::write_file(path, bytes)) {
    throw LibraryFormatError(LibraryFormatError::Kind::Io, "library: cannot write " + path);
  }
  const auto& m = lib.meta();
  nlohmann::ordered_json manifest = {
      {"magic", "SSGL"},
      {"version", kLibraryFormatVersion},
      {"N", m.n},
      {"n_z", m.n_z},
      {"length", m.length},
      {"seed", m.seed},
      {"map_digest", to_hex(m.map_digest)},
  };
  std::string text = manifest.dump(2) + "\n";
  if (!io::write_file(manifest_path(path), std::as_bytes(std::span(text.data(), text.size())))) {
    throw LibraryFormatError(LibraryFormatError::Kind::Io, "library: cannot write manifest for " + path);
  }
}

ShapeLibrary load_library(const std::string& path, std::optional<std::size_t> expected_n_z) {
  std::vector<std::byte> bytes;
  if (!io::read_file(path, bytes)) {
    throw LibraryFormatError(LibraryFormatError::Kind::Io, "library: cannot read " + path);
  }
  return deserialize_library(bytes, expected_n_z);
}

}  // namespace ssg
