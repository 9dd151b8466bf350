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

// Brute-force reference computations. These deliberately avoid the library's
// own implementation paths: they only read plain data out of the library
// types and recompute everything with direct loops.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ldo/aggregation.hpp"
#include "ldo/fusion.hpp"
#include "ldo/heights.hpp"
#include "ldo/voxelizer.hpp"

namespace ldo::testing {

// Per-axis scalar floor with the half-open [min, max) convention.
std::optional<std::array<std::uint32_t, 3>> OracleVoxel(const GridSpec& spec, double x, double y,
                                                        double z);

// Box membership from the six bounding half-spaces.
bool OracleInBox(const Vec3& p, const OrientedBox& box, double margin);

// track_id of the containing box with the nearest center, "" if none.
std::string OracleOwner(const Vec3& world, std::span<const OrientedBox> boxes, double margin);

struct OracleVoxelResult {
  std::uint16_t label = 0;
  bool label_dynamic = false;
  float density_weight = 0.0f;  // DensityMatrix semantics
  float grid_weight = 0.0f;     // LdoGrid semantics
};
// Tally every voxel by enumerating its points.
std::map<std::uint32_t, OracleVoxelResult> OracleVoxelize(const DenseCloud& cloud,
                                                          const GridSpec& spec,
                                                          std::uint16_t background,
                                                          WeightMode mode);

// Density factors per track, by direct counting.
std::map<std::string, std::map<std::uint32_t, double>> OracleFactors(const DenseCloud& cloud,
                                                                     const GridSpec& spec);

// Nested-loop forward passes.
std::vector<double> OracleConv3x3(const FeatureGrid& in, const FeatureGrid& kernel,
                                  const FeatureGrid& bias);
std::vector<double> OracleVhsAggregate(std::span<const FeatureGrid> pooled,
                                       const AggregationParams& p);
std::vector<double> OracleContext(const FeatureGrid& f, const ContextParams& p);
std::vector<double> OracleCff(const FeatureGrid& global, const FeatureGrid& local,
                              const FusionParams& p);

struct Confusion {
  std::uint64_t intersection = 0, union_ = 0;
  std::map<std::uint16_t, std::array<std::uint64_t, 3>> per_class;  // tp, fp, fn
};
Confusion OracleConfusion(std::span<const std::uint16_t> pred, std::span<const std::uint16_t> gt,
                          std::uint16_t class_count);

}  // namespace ldo::testing
