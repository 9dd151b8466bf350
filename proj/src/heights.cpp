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
#include "ldo/heights.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace ldo {
namespace {

FeatureGrid ReduceSlices(const FeatureGrid& volume, std::span<const std::uint32_t> slices,
                         PoolReduction reduction) {
  const std::size_t c = volume.dim(0), z = volume.dim(1), h = volume.dim(2), w = volume.dim(3);
  const std::size_t plane = h * w;
  FeatureGrid out({c, h, w});
  for (std::size_t ch = 0; ch < c; ++ch) {
    const float* base = volume.data().data() + ch * z * plane;
    float* dst = out.data().data() + ch * plane;
    std::copy_n(base + slices.front() * plane, plane, dst);
    for (std::size_t s = 1; s < slices.size(); ++s) {
      const float* src = base + slices[s] * plane;
      for (std::size_t i = 0; i < plane; ++i) {
        dst[i] = reduction == PoolReduction::kMax ? std::max(dst[i], src[i]) : dst[i] + src[i];
      }
    }
    if (reduction == PoolReduction::kMean) {
      for (std::size_t i = 0; i < plane; ++i) dst[i] /= static_cast<float>(slices.size());
    }
  }
  return out;
}

void RequireVolume(const FeatureGrid& volume) {
  if (volume.rank() != 4 || volume.dim(1) == 0) {
    throw Error(ErrorCode::kShapeMismatch,
                fmt::format("voxel features must be [C, Z, H, W] with Z > 0, got [{}]",
                            fmt::join(volume.dims(), ", ")));
  }
}

}  // namespace

std::string_view ToString(Layer layer) {
  switch (layer) {
    case Layer::kBase: return "BL";
    case Layer::kUniversal: return "UL";
    case Layer::kExtendedFocus: return "EFL";
  }
  return "?";
}

Layer ParseLayer(std::string_view text) {
  if (text == "BL") return Layer::kBase;
  if (text == "UL") return Layer::kUniversal;
  if (text == "EFL") return Layer::kExtendedFocus;
  throw Error(ErrorCode::kMalformedConfig,
              fmt::format("unknown height layer '{}' (expected BL, UL or EFL)", text));
}

HeightIntervalSet::HeightIntervalSet(std::vector<HeightInterval> intervals)
    : intervals_(std::move(intervals)) {
  if (intervals_.empty()) {
    throw Error(ErrorCode::kInvariantViolation, "height interval set is empty");
  }
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    const HeightInterval& iv = intervals_[i];
    if (!std::isfinite(iv.z_min) || !std::isfinite(iv.z_max) || !(iv.z_min < iv.z_max)) {
      throw Error(ErrorCode::kInvariantViolation,
                  fmt::format("height interval {} [{}, {}) is empty", i, iv.z_min, iv.z_max));
    }
  }
}

HeightIntervalSet HeightIntervalSet::Default() {
  return HeightIntervalSet({{-3.0, -2.0, Layer::kBase},
                            {-2.0, -1.0, Layer::kBase},
                            {-1.0, 0.0, Layer::kBase},
                            {0.0, 2.0, Layer::kBase},
                            {-5.0, 3.0, Layer::kUniversal},
                            {-4.0, 2.0, Layer::kExtendedFocus},
                            {-6.0, -4.0, Layer::kExtendedFocus},
                            {-2.0, 1.0, Layer::kUniversal}});
}

std::vector<HeightInterval> HeightIntervalSet::InLayer(Layer layer) const {
  std::vector<HeightInterval> out;
  std::copy_if(intervals_.begin(), intervals_.end(), std::back_inserter(out),
               [&](const HeightInterval& iv) { return iv.layer == layer; });
  return out;
}

HeightHistogram ComputeHeightHistogram(const LdoGrid& grid, double bin_size) {
  if (!(bin_size > 0.0) || !std::isfinite(bin_size)) {
    throw Error(ErrorCode::kInvariantViolation, fmt::format("bin size {} must be positive", bin_size));
  }
  const GridSpec& spec = grid.spec;
  const double span = spec.max().z() - spec.min().z();
  const auto bins = static_cast<std::size_t>(std::max(1.0, std::ceil(span / bin_size - 1e-9)));

  HeightHistogram histogram{spec.min().z(), bin_size, std::vector<std::uint64_t>(bins, 0)};
  const std::uint32_t dim_z = spec.dims()[2];
  std::vector<std::size_t> slice_bin(dim_z);
  for (std::uint32_t iz = 0; iz < dim_z; ++iz) {
    const double offset = (spec.SliceCenterZ(iz) - spec.min().z()) / bin_size;
    slice_bin[iz] = std::min(static_cast<std::size_t>(std::floor(offset)), bins - 1);
  }
  for (std::size_t i = 0; i < grid.labels.size(); ++i) {
    if (grid.labels[i] != kEmpty) ++histogram.counts[slice_bin[i % dim_z]];
  }
  return histogram;
}

std::vector<std::string> FormatHistogram(const HeightHistogram& histogram) {
  std::vector<std::string> lines;
  for (std::size_t b = 0; b < histogram.counts.size(); ++b) {
    const double lo = histogram.origin + b * histogram.bin_size;
    lines.push_back(fmt::format("[{:.3f}, {:.3f}) {}", lo, lo + histogram.bin_size,
                                histogram.counts[b]));
  }
  return lines;
}

double LayerCoverage(const LdoGrid& grid, const HeightIntervalSet& set, Layer layer) {
  const std::vector<HeightInterval> bands = set.InLayer(layer);
  const std::uint32_t dim_z = grid.spec.dims()[2];
  std::vector<bool> covered(dim_z, false);
  for (std::uint32_t iz = 0; iz < dim_z; ++iz) {
    const double zc = grid.spec.SliceCenterZ(iz);
    covered[iz] = std::any_of(bands.begin(), bands.end(),
                              [&](const HeightInterval& iv) { return iv.Contains(zc); });
  }
  std::size_t occupied = 0;
  std::size_t inside = 0;
  for (std::size_t i = 0; i < grid.labels.size(); ++i) {
    if (grid.labels[i] == kEmpty) continue;
    ++occupied;
    if (covered[i % dim_z]) ++inside;
  }
  return occupied == 0 ? 0.0 : static_cast<double>(inside) / static_cast<double>(occupied);
}

std::vector<std::uint32_t> SlicesInInterval(const GridSpec& spec, double z_min, double z_max) {
  const HeightInterval band{z_min, z_max, Layer::kBase};
  std::vector<std::uint32_t> slices;
  for (std::uint32_t iz = 0; iz < spec.dims()[2]; ++iz) {
    if (band.Contains(spec.SliceCenterZ(iz))) slices.push_back(iz);
  }
  return slices;
}

FeatureGrid VhsPool(const FeatureGrid& volume, double z_min, double z_max, const GridSpec& spec,
                    PoolReduction reduction) {
  RequireVolume(volume);
  if (volume.dim(1) != spec.dims()[2]) {
    throw Error(ErrorCode::kShapeMismatch,
                fmt::format("voxel features have {} z slices, grid has {}", volume.dim(1),
                            spec.dims()[2]));
  }
  const std::vector<std::uint32_t> slices = SlicesInInterval(spec, z_min, z_max);
  if (slices.empty()) {
    throw Error(ErrorCode::kEmptyInterval,
                fmt::format("no slice center in [{}, {}) for grid z range [{}, {})", z_min, z_max,
                            spec.min().z(), spec.max().z()));
  }
  return ReduceSlices(volume, slices, reduction);
}

FeatureGrid VhsPool(const FeatureGrid& volume, const HeightInterval& interval,
                    const GridSpec& spec, PoolReduction reduction) {
  return VhsPool(volume, interval.z_min, interval.z_max, spec, reduction);
}

FeatureGrid GlobalPool(const FeatureGrid& volume) {
  RequireVolume(volume);
  std::vector<std::uint32_t> all(volume.dim(1));
  for (std::uint32_t iz = 0; iz < all.size(); ++iz) all[iz] = iz;
  return ReduceSlices(volume, all, PoolReduction::kSum);
}

AggregationParams AggregationParams::Zeros(std::size_t levels, std::size_t channels) {
  const std::size_t in = levels * channels;
  return {FeatureGrid({in, channels}),          FeatureGrid({channels}),
          FeatureGrid({in, channels}),          FeatureGrid({channels}),
          FeatureGrid({channels, channels, 3, 3}), FeatureGrid({channels})};
}

AggregationParams AggregationParams::FromBundle(const TensorBundle& bundle) {
  AggregationParams p{FindTensor(bundle, "path1.weight"),        FindTensor(bundle, "path1.bias"),
                      FindTensor(bundle, "path2.linear.weight"), FindTensor(bundle, "path2.linear.bias"),
                      FindTensor(bundle, "path2.conv.weight"),   FindTensor(bundle, "path2.conv.bias")};
  p.Validate();
  return p;
}

TensorBundle AggregationParams::ToBundle() const {
  return {{"path1.weight", path1_weight},
          {"path1.bias", path1_bias},
          {"path2.linear.weight", path2_linear_weight},
          {"path2.linear.bias", path2_linear_bias},
          {"path2.conv.weight", path2_conv_weight},
          {"path2.conv.bias", path2_conv_bias}};
}

std::size_t AggregationParams::levels() const {
  const std::size_t c = channels();
  return c == 0 || path1_weight.rank() != 2 ? 0 : path1_weight.dim(0) / c;
}

void AggregationParams::Validate() const {
  const std::size_t c = channels();
  if (path1_bias.rank() != 1 || c == 0 || path1_weight.rank() != 2 ||
      path1_weight.dim(0) % c != 0 || path1_weight.dim(0) == 0) {
    throw Error(ErrorCode::kShapeMismatch,
                "aggregation path1 weight must be [L*C, C] with a [C] bias");
  }
  const std::size_t in = path1_weight.dim(0);
  RequireShape(path1_weight, {in, c}, "path1.weight");
  RequireShape(path2_linear_weight, {in, c}, "path2.linear.weight");
  RequireShape(path2_linear_bias, {c}, "path2.linear.bias");
  RequireShape(path2_conv_weight, {c, c, 3, 3}, "path2.conv.weight");
  RequireShape(path2_conv_bias, {c}, "path2.conv.bias");
}

FeatureGrid VhsAggregate(std::span<const FeatureGrid> pooled, const AggregationParams& params) {
  params.Validate();
  if (pooled.size() != params.levels()) {
    throw Error(ErrorCode::kShapeMismatch,
                fmt::format("{} pooled maps for parameters expecting {}", pooled.size(),
                            params.levels()));
  }
  const std::size_t c = params.channels();
  const FeatureGrid& first = pooled.front();
  if (first.rank() != 3) throw Error(ErrorCode::kShapeMismatch, "pooled maps must be [C, H, W]");
  const std::size_t h = first.dim(1), w = first.dim(2);

  FeatureGrid stacked({pooled.size() * c, h, w});
  for (std::size_t l = 0; l < pooled.size(); ++l) {
    RequireShape(pooled[l], {c, h, w}, fmt::format("pooled map {}", l));
    std::copy(pooled[l].data().begin(), pooled[l].data().end(),
              stacked.data().begin() + l * c * h * w);
  }

  FeatureGrid out = Project(stacked, params.path1_weight, params.path1_bias);
  const FeatureGrid path2 =
      Conv3x3(Project(stacked, params.path2_linear_weight, params.path2_linear_bias),
              params.path2_conv_weight, params.path2_conv_bias);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += path2[i];
  return out;
}

}  // namespace ldo
