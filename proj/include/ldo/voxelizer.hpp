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

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ldo/aggregation.hpp"
#include "ldo/geometry.hpp"
#include "ldo/ingest.hpp"

namespace ldo {

inline constexpr std::uint16_t kEmpty = 0;

using VoxelCoord = std::array<std::uint32_t, 3>;

// Axis-aligned box [min, max) cut into voxels. dims() is (H, W, Z) along x, y, z.
class GridSpec {
 public:
  // Throws InvalidGridSpec unless max > min, voxel_size > 0 and every span is
  // an integer multiple of the voxel size (within 1e-9).
  GridSpec(const Vec3& min, const Vec3& max, const Vec3& voxel_size);

  // X, Y in [-51.2, 51.2] m, Z in [-5, 3] m, 0.8 m voxels: 128 x 128 x 10.
  static GridSpec Base();
  // Same range at (0.4, 0.4, 0.5) m: 256 x 256 x 16.
  static GridSpec Large();

  const Vec3& min() const { return min_; }
  const Vec3& max() const { return max_; }
  const Vec3& voxel_size() const { return voxel_size_; }
  const VoxelCoord& dims() const { return dims_; }
  std::size_t voxel_count() const {
    return static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2];
  }

  std::uint32_t Linear(const VoxelCoord& c) const { return (c[0] * dims_[1] + c[1]) * dims_[2] + c[2]; }
  VoxelCoord Unlinear(std::uint32_t index) const;
  // Height of the center of z slice `iz`.
  double SliceCenterZ(std::uint32_t iz) const { return min_.z() + (iz + 0.5) * voxel_size_.z(); }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  Vec3 min_;
  Vec3 max_;
  Vec3 voxel_size_;
  VoxelCoord dims_{};
};

// floor((p - min) / voxel_size) for points inside [min, max) on every axis.
std::optional<VoxelCoord> VoxelIndex(const GridSpec& spec, const Vec3& p);

enum class WeightMode { kBasePlusFactor, kFactorOnly };

struct VoxelizeOptions {
  // Class given to unlabeled (and EMPTY-labeled) static points.
  std::uint16_t background_class = 1;
  WeightMode weight_mode = WeightMode::kBasePlusFactor;
  int jobs = 1;
};

// Dense semantic occupancy with its per-voxel density weights, both stored in
// linear order ((ix * H_y) + iy) * Z + iz.
struct LdoGrid {
  GridSpec spec;
  std::vector<std::uint16_t> labels;
  std::vector<float> weights;

  explicit LdoGrid(const GridSpec& s)
      : spec(s), labels(s.voxel_count(), kEmpty), weights(s.voxel_count(), 0.0f) {}

  std::size_t occupied_count() const;
  friend bool operator==(const LdoGrid&, const LdoGrid&) = default;
};

// Majority vote per voxel. On equal counts a label carried by dynamic points
// wins over one carried only by static points, then the smaller class id.
std::vector<std::uint16_t> VoxelizeLabels(const DenseCloud& cloud, const GridSpec& spec,
                                          const VoxelizeOptions& options = {});

// Local density factors per dynamic object: for each track, the share of its
// in-grid points that fall in each voxel it occupies. Keys are linear indices.
std::map<std::string, std::map<std::uint32_t, double>> DensityFactors(const DenseCloud& cloud,
                                                                      const GridSpec& spec);

// Weight per voxel: 0 for empty voxels, 1 for voxels with only static
// points, and 1 + factor (or factor alone under kFactorOnly) for voxels
// holding dynamic points. A voxel shared by several objects takes the factor
// of the object with more points there (ties: smaller track_id).
std::vector<float> DensityMatrix(const DenseCloud& cloud, const GridSpec& spec,
                                 const VoxelizeOptions& options = {});

// Labels and weights of a dense cloud. A voxel whose winning label is static
// keeps weight 1 even if it also holds a few dynamic points.
LdoGrid VoxelizeCloud(const DenseCloud& cloud, const GridSpec& spec,
                      const VoxelizeOptions& options = {});

LdoGrid BuildLdo(const SceneSequence& scene, const GridSpec& spec, double margin = 0.0,
                 const VoxelizeOptions& options = {});

// Throws InvariantViolation unless array sizes match the spec, weights are
// finite and non-negative, and a voxel is EMPTY exactly when its weight is 0.
void ValidateLdo(const LdoGrid& grid);

// LDOC occupancy file.
std::vector<char> EncodeOcc(const LdoGrid& grid);
LdoGrid DecodeOcc(std::span<const char> bytes, const std::string& source = "<memory>");
void WriteOcc(const std::filesystem::path& path, const LdoGrid& grid);
LdoGrid ReadOcc(const std::filesystem::path& path);

}  // namespace ldo
