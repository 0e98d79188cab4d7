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

// Little-endian encode/decode helpers shared by the library and graph file formats.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

namespace ssg::io {

class Writer {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::byte*>(data);
    buf_.insert(buf_.end(), p, p + n);
  }
  void tag(const char (&magic)[5]) { bytes(magic, 4); }
  void u32(std::uint32_t v) { put_le(v); }
  void u64(std::uint64_t v) { put_le(v); }
  void f64(double v) { put_le(std::bit_cast<std::uint64_t>(v)); }

  template <typename T>
  void array(std::span<const T> values) {
    if constexpr (std::endian::native == std::endian::little) {
      bytes(values.data(), values.size_bytes());
    } else {
      for (const T& v : values) {
        if constexpr (std::is_same_v<T, double>) f64(v);
        else put_le(v);
      }
    }
  }

  void reserve(std::size_t n) { buf_.reserve(n); }
  const std::vector<std::byte>& buffer() const { return buf_; }
  std::vector<std::byte>& buffer() { return buf_; }

 private:
  template <typename U>
  void put_le(U v) {
    static_assert(std::is_unsigned_v<U>);
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      buf_.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFF));
    }
  }

  std::vector<std::byte> buf_;
};

// Bounds-checked cursor; callers check remaining() before reading.
class Reader {
 public:
  explicit Reader(std::span<const std::byte> data) : data_(data) {}

  std::size_t remaining() const { return data_.size() - pos_; }
  std::size_t position() const { return pos_; }

  bool tag_equals(const char (&magic)[5]) {
    bool eq = std::memcmp(data_.data() + pos_, magic, 4) == 0;
    pos_ += 4;
    return eq;
  }
  void bytes(void* out, std::size_t n) {
    std::memcpy(out, data_.data() + pos_, n);
    pos_ += n;
  }
  std::uint32_t u32() { return get_le<std::uint32_t>(); }
  std::uint64_t u64() { return get_le<std::uint64_t>(); }
  double f64() { return std::bit_cast<double>(get_le<std::uint64_t>()); }

  template <typename T>
  void array(std::span<T> out) {
    if constexpr (std::endian::native == std::endian::little) {
      bytes(out.data(), out.size_bytes());
    } else {
      for (T& v : out) {
        if constexpr (std::is_same_v<T, double>) v = f64();
        else v = get_le<T>();
      }
    }
  }

 private:
  template <typename U>
  U get_le() {
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      v |= static_cast<U>(std::to_integer<std::uint8_t>(data_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(U);
    return v;
  }

  std::span<const std::byte> data_;
  std::size_t pos_ = 0;
};

// Whole-file helpers. Return false on open/read failure.
bool read_file(const std::string& path, std::vector<std::byte>& out);
bool write_file(const std::string& path, std::span<const std::byte> data);

}  // namespace ssg::io
