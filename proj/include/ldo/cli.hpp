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
#include <iosfwd>
#include <optional>

#include "ldo/error.hpp"

namespace ldo::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitIo = 3;

int ExitCodeFor(ErrorCode code);

struct GenerateRequest {
  std::filesystem::path manifest;
  std::optional<std::filesystem::path> config;
  std::filesystem::path out;
  int jobs = 1;
};

// Each command reports errors on `err` and returns the process exit code.
int RunGenerate(const GenerateRequest& request, std::ostream& out, std::ostream& err);
int RunStats(const std::filesystem::path& occ, double bin_size,
             const std::optional<std::filesystem::path>& config, std::ostream& out,
             std::ostream& err);
int RunMetrics(const std::filesystem::path& pred, const std::filesystem::path& gt,
               std::uint16_t class_count, std::ostream& out, std::ostream& err);

}  // namespace ldo::cli
