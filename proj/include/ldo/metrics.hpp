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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ldo/voxelizer.hpp"

namespace ldo {

struct ClassIou {
  std::uint16_t label = 0;
  std::uint64_t true_positive = 0;
  std::uint64_t false_positive = 0;
  std::uint64_t false_negative = 0;
  // Absent when the class appears in neither grid.
  std::optional<double> iou;
};

struct OccEvalReport {
  // Occupied-vs-EMPTY IoU. 1.0 when neither grid has an occupied voxel.
  double sc_iou = 0.0;
  std::uint64_t occupied_intersection = 0;
  std::uint64_t occupied_union = 0;
  // One entry per semantic class 1..M-1 (EMPTY is not a semantic class).
  std::vector<ClassIou> per_class;
  // Mean over classes with a defined IoU; 1.0 when there are none.
  double ssc_miou = 0.0;
  std::size_t defined_classes = 0;
};

// Throws DimMismatch if the grids differ in size and LabelOutOfRange for any
// label >= class_count.
OccEvalReport Evaluate(std::span<const std::uint16_t> pred, std::span<const std::uint16_t> gt,
                       std::uint16_t class_count);
// Also checks that both grids share the same dims.
OccEvalReport Evaluate(const LdoGrid& pred, const LdoGrid& gt, std::uint16_t class_count);

// "sc_iou", "ssc_miou" summary lines followed by one line per class.
std::string FormatReport(const OccEvalReport& report);

}  // namespace ldo
