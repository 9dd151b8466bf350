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
#include "ldo/cli.hpp"

#include <map>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "ldo/config.hpp"
#include "ldo/heights.hpp"
#include "ldo/ingest.hpp"
#include "ldo/metrics.hpp"
#include "ldo/voxelizer.hpp"

namespace ldo::cli {
namespace {

template <typename Fn>
int Guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitIo;
  }
}

}  // namespace

int ExitCodeFor(ErrorCode code) {
  return code == ErrorCode::kIoFailure ? kExitIo : kExitInvalidInput;
}

int RunGenerate(const GenerateRequest& request, std::ostream& out, std::ostream& err) {
  return Guarded(err, [&] {
    if (request.jobs < 1) {
      fmt::print(err, "error: --jobs must be at least 1\n");
      return kExitUsage;
    }
    const PipelineConfig config = request.config ? LoadConfig(*request.config) : PipelineConfig{};
    const SceneSequence scene = LoadScene(request.manifest);
    if (scene.class_count > config.class_count) {
      throw Error(ErrorCode::kInvariantViolation,
                  fmt::format("{}: class_count {} exceeds the configured {}",
                              request.manifest.string(), scene.class_count, config.class_count));
    }
    const LdoGrid grid =
        BuildLdo(scene, config.grid, config.margin, config.voxelize_options(request.jobs));
    WriteOcc(request.out, grid);
    const VoxelCoord& dims = grid.spec.dims();
    fmt::print(out, "wrote {} dims [{}, {}, {}] occupied {}\n", request.out.string(), dims[0],
               dims[1], dims[2], grid.occupied_count());
    return kExitOk;
  });
}

int RunStats(const std::filesystem::path& occ, double bin_size,
             const std::optional<std::filesystem::path>& config_path, std::ostream& out,
             std::ostream& err) {
  return Guarded(err, [&] {
    const PipelineConfig config = config_path ? LoadConfig(*config_path) : PipelineConfig{};
    const LdoGrid grid = ReadOcc(occ);

    std::map<std::uint16_t, std::uint64_t> per_class;
    for (std::uint16_t label : grid.labels) {
      if (label != kEmpty) ++per_class[label];
    }
    fmt::print(out, "occupied {}\n", grid.occupied_count());
    for (const auto& [label, count] : per_class) fmt::print(out, "class {} {}\n", label, count);

    fmt::print(out, "height histogram (bin {} m)\n", bin_size);
    for (const std::string& line : FormatHistogram(ComputeHeightHistogram(grid, bin_size))) {
      fmt::print(out, "{}\n", line);
    }
    for (Layer layer : {Layer::kBase, Layer::kUniversal, Layer::kExtendedFocus}) {
      fmt::print(out, "layer {} coverage {:.6f}\n", ToString(layer),
                 LayerCoverage(grid, config.intervals, layer));
    }
    return kExitOk;
  });
}

int RunMetrics(const std::filesystem::path& pred, const std::filesystem::path& gt,
               std::uint16_t class_count, std::ostream& out, std::ostream& err) {
  return Guarded(err, [&] {
    const OccEvalReport report = Evaluate(ReadOcc(pred), ReadOcc(gt), class_count);
    out << FormatReport(report);
    return kExitOk;
  });
}

}  // namespace ldo::cli
