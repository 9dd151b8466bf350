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
#include <filesystem>
#include <string>

#include "ldo/fusion.hpp"
#include "ldo/heights.hpp"
#include "ldo/voxelizer.hpp"

namespace ldo {

// Pipeline settings. Defaults reproduce the base setup: +-51.2 m at 0.8 m in
// x/y, z in [-5, 3) m, the eight default height intervals and beta = 0.9.
struct PipelineConfig {
  GridSpec grid = GridSpec::Base();
  HeightIntervalSet intervals = HeightIntervalSet::Default();
  double margin = 0.0;
  double beta = kDefaultBeta;
  std::uint16_t class_count = 18;
  std::uint16_t background_class = 1;
  WeightMode weight_mode = WeightMode::kBasePlusFactor;

  VoxelizeOptions voxelize_options(int jobs = 1) const {
    return {background_class, weight_mode, jobs};
  }
};

// JSON object with any of the keys "grid" {min, max, voxel_size},
// "intervals" [[z_min, z_max, "BL"|"UL"|"EFL"], ...], "margin", "beta",
// "class_count", "background_class", "weight_mode"
// ("base_plus_factor" | "factor_only"). Missing keys keep their defaults;
// unknown keys are rejected. Errors carry `source` and the offending key.
PipelineConfig ParseConfig(const std::string& text, const std::string& source = "<config>");
PipelineConfig LoadConfig(const std::filesystem::path& path);
std::string DumpConfig(const PipelineConfig& config);

}  // namespace ldo
