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
#include "ldo/metrics.hpp"

#include <fmt/format.h>

#include "ldo/error.hpp"

namespace ldo {

OccEvalReport Evaluate(std::span<const std::uint16_t> pred, std::span<const std::uint16_t> gt,
                       std::uint16_t class_count) {
  if (pred.size() != gt.size()) {
    throw Error(ErrorCode::kDimMismatch,
                fmt::format("prediction has {} voxels, ground truth {}", pred.size(), gt.size()));
  }
  // Per-class counts are enough: fp = predicted - tp and fn = actual - tp.
  std::vector<std::uint64_t> hits(class_count, 0), predicted(class_count, 0), actual(class_count, 0);
  OccEvalReport report;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const std::uint16_t p = pred[i], g = gt[i];
    if (p >= class_count || g >= class_count) {
      throw Error(ErrorCode::kLabelOutOfRange,
                  fmt::format("voxel {} has labels pred={} gt={} for {} classes", i, p, g,
                              class_count));
    }
    ++predicted[p];
    ++actual[g];
    if (p == g) ++hits[p];
    if (p != kEmpty && g != kEmpty) ++report.occupied_intersection;
    if (p != kEmpty || g != kEmpty) ++report.occupied_union;
  }
  report.sc_iou = report.occupied_union == 0
                      ? 1.0
                      : static_cast<double>(report.occupied_intersection) /
                            static_cast<double>(report.occupied_union);

  double iou_sum = 0.0;
  for (std::size_t c = 1; c < class_count; ++c) {
    ClassIou entry;
    entry.label = static_cast<std::uint16_t>(c);
    entry.true_positive = hits[c];
    entry.false_positive = predicted[c] - hits[c];
    entry.false_negative = actual[c] - hits[c];
    const std::uint64_t denom = entry.true_positive + entry.false_positive + entry.false_negative;
    if (denom > 0) {
      entry.iou = static_cast<double>(entry.true_positive) / static_cast<double>(denom);
      iou_sum += *entry.iou;
      ++report.defined_classes;
    }
    report.per_class.push_back(entry);
  }
  report.ssc_miou =
      report.defined_classes == 0 ? 1.0 : iou_sum / static_cast<double>(report.defined_classes);
  return report;
}

OccEvalReport Evaluate(const LdoGrid& pred, const LdoGrid& gt, std::uint16_t class_count) {
  const VoxelCoord& a = pred.spec.dims();
  const VoxelCoord& b = gt.spec.dims();
  if (a != b) {
    throw Error(ErrorCode::kDimMismatch,
                fmt::format("prediction dims [{}, {}, {}] differ from ground truth [{}, {}, {}]",
                            a[0], a[1], a[2], b[0], b[1], b[2]));
  }
  return Evaluate(pred.labels, gt.labels, class_count);
}

std::string FormatReport(const OccEvalReport& report) {
  std::string out = fmt::format("sc_iou {:.6f} ({} / {})\n", report.sc_iou,
                                report.occupied_intersection, report.occupied_union);
  out += fmt::format("ssc_miou {:.6f} over {} classes\n", report.ssc_miou, report.defined_classes);
  for (const ClassIou& c : report.per_class) {
    if (c.iou) {
      out += fmt::format("class {} iou {:.6f} tp {} fp {} fn {}\n", c.label, *c.iou,
                         c.true_positive, c.false_positive, c.false_negative);
    } else {
      out += fmt::format("class {} iou undefined\n", c.label);
    }
  }
  return out;
}

}  // namespace ldo
