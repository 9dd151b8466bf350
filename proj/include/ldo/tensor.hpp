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

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "ldo/error.hpp"

namespace ldo {

// Dense row-major n-dimensional array.
template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> dims, T fill = T{})
      : dims_(std::move(dims)), data_(Product(dims_), fill) {}
  // Throws ShapeMismatch if the payload length disagrees with dims and
  // InvariantViolation on non-finite values.
  Tensor(std::vector<std::size_t> dims, std::vector<T> data)
      : dims_(std::move(dims)), data_(std::move(data)) {
    if (data_.size() != Product(dims_)) {
      throw Error(ErrorCode::kShapeMismatch,
                  fmt::format("tensor of shape [{}] needs {} values, got {}",
                              fmt::join(dims_, ", "), Product(dims_), data_.size()));
    }
    for (const T& v : data_) {
      if (!std::isfinite(v)) throw Error(ErrorCode::kInvariantViolation, "tensor holds a non-finite value");
    }
  }

  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t dim(std::size_t axis) const { return dims_.at(axis); }
  std::size_t rank() const { return dims_.size(); }
  std::size_t size() const { return data_.size(); }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  template <typename... I>
  T& operator()(I... idx) { return data_[Offset({static_cast<std::size_t>(idx)...})]; }
  template <typename... I>
  const T& operator()(I... idx) const { return data_[Offset({static_cast<std::size_t>(idx)...})]; }

  // Same payload, new shape of equal element count.
  Tensor Reshaped(std::vector<std::size_t> dims) const {
    if (Product(dims) != data_.size()) {
      throw Error(ErrorCode::kShapeMismatch,
                  fmt::format("cannot reshape [{}] into [{}]", fmt::join(dims_, ", "),
                              fmt::join(dims, ", ")));
    }
    Tensor out;
    out.dims_ = std::move(dims);
    out.data_ = data_;
    return out;
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;

  static std::size_t Product(const std::vector<std::size_t>& dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
  }

 private:
  std::size_t Offset(std::initializer_list<std::size_t> idx) const {
    std::size_t offset = 0;
    std::size_t axis = 0;
    for (std::size_t i : idx) offset = offset * dims_[axis++] + i;
    return offset;
  }

  std::vector<std::size_t> dims_;
  std::vector<T> data_;
};

using FeatureGrid = Tensor<float>;
using ProbabilityGrid = Tensor<double>;

// Throws ShapeMismatch naming `what` unless t has exactly `dims`.
template <typename T>
void RequireShape(const Tensor<T>& t, const std::vector<std::size_t>& dims, std::string_view what) {
  if (t.dims() != dims) {
    throw Error(ErrorCode::kShapeMismatch,
                fmt::format("{} has shape [{}], expected [{}]", what, fmt::join(t.dims(), ", "),
                            fmt::join(dims, ", ")));
  }
}

// 3x3 convolution, stride 1, zero padding 1. input [Ci,H,W], kernel
// [Co,Ci,3,3], bias [Co]. Accumulates in double.
FeatureGrid Conv3x3(const FeatureGrid& input, const FeatureGrid& kernel, const FeatureGrid& bias);

// Per-site linear map (a 1x1 convolution). input [Ci,H,W], weight [Ci,Co],
// bias [Co].
FeatureGrid Project(const FeatureGrid& input, const FeatureGrid& weight, const FeatureGrid& bias);

// Named tensors in the LDOT container: "LDOT", u32 version, u32 count, then
// per tensor u32 name length, UTF-8 name, u8 rank, rank x u32 dims, f32 data.
struct NamedTensor {
  std::string name;
  FeatureGrid tensor;
};
using TensorBundle = std::vector<NamedTensor>;

std::vector<char> EncodeTensorBundle(const TensorBundle& bundle);
TensorBundle DecodeTensorBundle(std::span<const char> bytes, const std::string& source = "<memory>");
void WriteTensorBundle(const std::filesystem::path& path, const TensorBundle& bundle);
TensorBundle ReadTensorBundle(const std::filesystem::path& path);
// Throws ShapeMismatch if `name` is absent.
const FeatureGrid& FindTensor(const TensorBundle& bundle, std::string_view name);

}  // namespace ldo
