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

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ldo/tensor.hpp"
#include "ldo/voxelizer.hpp"

namespace ldo {

// Base, Universal and Extended Focus layers of the height intervals.
enum class Layer { kBase, kUniversal, kExtendedFocus };

std::string_view ToString(Layer layer);
// Accepts "BL", "UL", "EFL". Throws MalformedConfig otherwise.
Layer ParseLayer(std::string_view text);

// Half-open height band [z_min, z_max) in meters.
struct HeightInterval {
  double z_min = 0.0;
  double z_max = 0.0;
  Layer layer = Layer::kBase;

  bool Contains(double z) const { return z >= z_min && z < z_max; }
  friend bool operator==(const HeightInterval&, const HeightInterval&) = default;
};

class HeightIntervalSet {
 public:
  // Throws InvariantViolation if empty or any z_min >= z_max.
  explicit HeightIntervalSet(std::vector<HeightInterval> intervals);

  // The eight default intervals: four base, two universal, two extended.
  static HeightIntervalSet Default();

  const std::vector<HeightInterval>& intervals() const { return intervals_; }
  std::size_t size() const { return intervals_.size(); }
  std::vector<HeightInterval> InLayer(Layer layer) const;

  friend bool operator==(const HeightIntervalSet&, const HeightIntervalSet&) = default;

 private:
  std::vector<HeightInterval> intervals_;
};

struct HeightHistogram {
  double origin = 0.0;
  double bin_size = 0.0;
  std::vector<std::uint64_t> counts;
};

// Occupied voxels binned by the height of their slice center. Bins start at
// spec.min.z and cover up to spec.max.z.
HeightHistogram ComputeHeightHistogram(const LdoGrid& grid, double bin_size);
// One line per bin: "[lo, hi) count".
std::vector<std::string> FormatHistogram(const HeightHistogram& histogram);

// Fraction of occupied voxels whose slice center lies in at least one
// interval of `layer`. Zero for an empty grid.
double LayerCoverage(const LdoGrid& grid, const HeightIntervalSet& set, Layer layer);

enum class PoolReduction { kSum, kMean, kMax };

// Slices of `spec` whose center height falls in [z_min, z_max).
std::vector<std::uint32_t> SlicesInInterval(const GridSpec& spec, double z_min, double z_max);

// Reduces a [C, Z, H, W] volume over the slices whose center lies in the
// interval, giving [C, H, W]. Throws ShapeMismatch if Z disagrees with the
// spec and EmptyInterval if no slice qualifies.
FeatureGrid VhsPool(const FeatureGrid& volume, double z_min, double z_max, const GridSpec& spec,
                    PoolReduction reduction = PoolReduction::kSum);
FeatureGrid VhsPool(const FeatureGrid& volume, const HeightInterval& interval,
                    const GridSpec& spec, PoolReduction reduction = PoolReduction::kSum);

// Sum over every z slice of a [C, Z, H, W] volume.
FeatureGrid GlobalPool(const FeatureGrid& volume);

// Parameters of the two pathways merging L pooled maps of C channels.
struct AggregationParams {
  FeatureGrid path1_weight;         // [L*C, C]
  FeatureGrid path1_bias;           // [C]
  FeatureGrid path2_linear_weight;  // [L*C, C]
  FeatureGrid path2_linear_bias;    // [C]
  FeatureGrid path2_conv_weight;    // [C, C, 3, 3]
  FeatureGrid path2_conv_bias;      // [C]

  static AggregationParams Zeros(std::size_t levels, std::size_t channels);
  // Reads "path1.weight", "path1.bias", "path2.linear.weight", ... from a bundle.
  static AggregationParams FromBundle(const TensorBundle& bundle);
  TensorBundle ToBundle() const;

  std::size_t channels() const { return path1_bias.size(); }
  std::size_t levels() const;
  void Validate() const;
};

// Concatenates the pooled maps along channels, then sums a 1x1 projection and
// a per-site linear layer followed by a 3x3 convolution.
FeatureGrid VhsAggregate(std::span<const FeatureGrid> pooled, const AggregationParams& params);

}  // namespace ldo
