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

namespace ssg {

// Produces a centerline for an activation. Implementations must be deterministic
// and safe to call concurrently.
class ShapeSource {
 public:
  virtual ~ShapeSource() = default;
  virtual CenterlineShape shape(const ActivationVector& gamma, std::size_t n_z) const = 0;
  virtual double length() const = 0;
  virtual Digest digest() const = 0;
};

// Unloaded filament: intrinsic shape from the actuation map, integrated with RK4.
class FilamentShapeSource final : public ShapeSource {
 public:
  FilamentShapeSource(ActuationMap map, double length);

  CenterlineShape shape(const ActivationVector& gamma, std::size_t n_z) const override;
  double length() const override { return length_; }
  Digest digest() const override { return map_.digest(); }
  const ActuationMap& map() const { return map_; }

 private:
  ActuationMap map_;
  double length_;
};

struct LibraryMeta {
  std::uint64_t n = 0;
  std::uint32_t n_z = 0;
  double length = 0.0;
  std::uint64_t seed = 0;
  Digest map_digest{};
};

using ShapeView = Eigen::Map<const PointMatrix>;

// Immutable after construction. Shapes are stored contiguously, one record of
// n_z * 3 doubles (row-major) per entry.
class ShapeLibrary {
 public:
  ShapeLibrary(LibraryMeta meta, std::vector<Vec3> gammas, std::vector<double> points);

  std::size_t size() const { return gammas_.size(); }
  std::size_t n_z() const { return meta_.n_z; }
  std::size_t record_dim() const { return 3 * meta_.n_z; }
  double length() const { return meta_.length; }
  const LibraryMeta& meta() const { return meta_; }

  const Vec3& gamma(std::size_t i) const { return gammas_[i]; }
  ShapeView shape_view(std::size_t i) const;
  CenterlineShape shape(std::size_t i) const;
  Vec3 tip(std::size_t i) const;
  std::span<const double> record(std::size_t i) const;
  std::span<const double> flat_points() const { return points_; }

  bool operator==(const ShapeLibrary& o) const;

 private:
  LibraryMeta meta_;
  std::vector<Vec3> gammas_;
  std::vector<double> points_;
};

class ShapeSourceError : public std::runtime_error {
 public:
  ShapeSourceError(const std::string& what, const Vec3& gamma, std::size_t index)
      : std::runtime_error(what), gamma_(gamma), index_(index) {}
  const Vec3& gamma() const { return gamma_; }
  std::size_t index() const { return index_; }

 private:
  Vec3 gamma_;
  std::size_t index_;
};

class LibraryFormatError : public std::runtime_error {
 public:
  enum class Kind { Io, MalformedHeader, TruncatedRecords, NzMismatch };
  LibraryFormatError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

inline constexpr std::uint32_t kLibraryFormatVersion = 1;
inline constexpr std::size_t kLibraryHeaderBytes = 4 + 4 + 8 + 4 + 8 + 8 + 32;

// i.i.d. uniform over [-1.67, 0]^3 from std::mt19937_64 seeded with `seed`;
// uniform doubles are formed from the top 53 bits of each draw.
std::vector<ActivationVector> sample_activations(std::size_t n, std::uint64_t seed);

// Entry 0 is always the zero-activation shape; entries 1..n-1 come from
// sample_activations(n - 1, seed). Parallel over entries, order-independent.
ShapeLibrary generate_library(const ShapeSource& source, std::size_t n, std::size_t n_z,
                              std::uint64_t seed);

// Builds a library from explicit activations (no zero entry is inserted).
ShapeLibrary library_from_activations(const ShapeSource& source, std::span<const ActivationVector> gammas,
                                      std::size_t n_z, std::uint64_t seed);

std::vector<std::byte> serialize_library(const ShapeLibrary& lib);
ShapeLibrary deserialize_library(std::span<const std::byte> bytes,
                                 std::optional<std::size_t> expected_n_z = std::nullopt);

// Digest of the canonical binary encoding (equals sha256 of the saved file).
Digest library_digest(const ShapeLibrary& lib);

// Writes `path` and a JSON manifest at `path + ".json"`.
void save_library(const ShapeLibrary& lib, const std::string& path);
ShapeLibrary load_library(const std::string& path, std::optional<std::size_t> expected_n_z = std::nullopt);

std::string manifest_path(const std::string& library_path);

}  // namespace ssg
