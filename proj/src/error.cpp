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
#include "ldo/error.hpp"

namespace ldo {

std::string_view ToString(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedManifest: return "MalformedManifest";
    case ErrorCode::kMalformedConfig: return "MalformedConfig";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kBadVersion: return "BadVersion";
    case ErrorCode::kTruncatedFile: return "TruncatedFile";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kInvalidGridSpec: return "InvalidGridSpec";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kEmptyInterval: return "EmptyInterval";
    case ErrorCode::kIndivisibleChannels: return "IndivisibleChannels";
    case ErrorCode::kNotNormalized: return "NotNormalized";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kLabelOutOfRange: return "LabelOutOfRange";
  }
  return "Unknown";
}

}  // namespace ldo
