/* Copyright 2026 The LDO Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#pragma once

// Little-endian packing helpers shared by the point, occupancy and tensor
// container formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "ldo/error.hpp"

namespace ldo::io {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

class ByteWriter {
 public:
  template <typename T>
    requires std::is_arithmetic_v<T>
  void Put(T value) {
    const auto* raw = reinterpret_cast<const char*>(&value);
    bytes_.insert(bytes_.end(), raw, raw + sizeof(T));
  }
  void PutBytes(std::string_view raw) { bytes_.insert(bytes_.end(), raw.begin(), raw.end()); }
  void Reserve(std::size_t n) { bytes_.reserve(n); }

  const std::vector<char>& bytes() const { return bytes_; }

 private:
  std::vector<char> bytes_;
};

class ByteReader {
 public:
  ByteReader(std::span<const char> bytes, std::string source)
      : bytes_(bytes), source_(std::move(source)) {}

  template <typename T>
    requires std::is_arithmetic_v<T>
  T Get(std::string_view field) {
    Require(sizeof(T), field);
    T value;
    std::memcpy(&value, bytes_.data() + offset_, sizeof(T));
    offset_ += sizeof(T);
    return value;
  }

  std::string GetBytes(std::size_t n, std::string_view field) {
    Require(n, field);
    std::string out(bytes_.data() + offset_, n);
    offset_ += n;
    return out;
  }

  std::size_t remaining() const { return bytes_.size() - offset_; }
  const std::string& source() const { return source_; }

 private:
  void Require(std::size_t n, std::string_view field) const {
    if (bytes_.size() - offset_ < n) {
      throw Error(ErrorCode::kTruncatedFile,
                  source_ + ": file ends while reading '" + std::string(field) + "'");
    }
  }

  std::span<const char> bytes_;
  std::string source_;
  std::size_t offset_ = 0;
};

std::vector<char> ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, std::span<const char> bytes);

}  // namespace ldo::io
