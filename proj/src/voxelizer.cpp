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
#include "ldo/voxelizer.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include <fmt/format.h>

#include "binary_io.hpp"
#include "ldo/error.hpp"
#include "ldo/parallel.hpp"

namespace ldo {
namespace {

constexpr char kOccMagic[4] = {'L', 'D', 'O', 'C'};
constexpr std::uint32_t kOccVersion = 1;
constexpr std::size_t kOccRecordBytes = 10;

// One in-grid point reduced to what the vote and the density weights need.
struct Entry {
  std::uint32_t voxel;
  std::uint16_t label;
  std::uint8_t dynamic;
  std::int32_t track;  // ordinal in sorted track_id order, -1 for static

  auto Key() const { return std::tie(voxel, label, dynamic, track); }
  bool operator<(const Entry& o) const { return Key() < o.Key(); }
};

struct Entries {
  std::vector<Entry> entries;        // sorted
  std::vector<std::string> tracks;   // ordinal -> track_id
  std::vector<std::uint64_t> track_totals;
};

Entries CollectEntries(const DenseCloud& cloud, const GridSpec& spec,
                       std::uint16_t background, int jobs) {
  Entries out;
  std::map<std::string, std::int32_t> ordinals;
  for (const Provenance& p : cloud.provenance) {
    if (p.source == Source::kDynamic) ordinals.emplace(p.track_id, 0);
  }
  for (auto& [id, ordinal] : ordinals) {
    ordinal = static_cast<std::int32_t>(out.tracks.size());
    out.tracks.push_back(id);
  }
  out.track_totals.assign(out.tracks.size(), 0);

  const std::size_t n = cloud.size();
  const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(n, std::max(jobs, 1)));
  std::vector<std::vector<Entry>> partial(chunks);
  ParallelFor(chunks, jobs, [&](std::size_t c) {
    for (std::size_t i = n * c / chunks; i < n * (c + 1) / chunks; ++i) {
      const auto voxel = VoxelIndex(spec, cloud.points[i].position);
      if (!voxel) continue;
      const Provenance& prov = cloud.provenance[i];
      std::uint16_t label = cloud.points[i].label;
      if (label == kUnlabeled || label == kEmpty) label = background;
      const bool dynamic = prov.source == Source::kDynamic;
      partial[c].push_back({spec.Linear(*voxel), label, static_cast<std::uint8_t>(dynamic),
                            dynamic ? ordinals.at(prov.track_id) : -1});
    }
  });
  for (auto& part : partial) out.entries.insert(out.entries.end(), part.begin(), part.end());
  std::sort(out.entries.begin(), out.entries.end());
  for (const Entry& e : out.entries) {
    if (e.track >= 0) ++out.track_totals[e.track];
  }
  return out;
}

struct VoxelOutcome {
  std::uint32_t voxel = 0;
  std::uint16_t label = kEmpty;
  bool label_is_dynamic = false;
  std::int32_t owner = -1;      // dominant dynamic object, -1 if none
  std::uint64_t owner_count = 0;
};

// Walks the sorted entries one voxel at a time.
std::vector<VoxelOutcome> Summarize(const Entries& data) {
  std::vector<VoxelOutcome> out;
  const auto& e = data.entries;
  std::size_t begin = 0;
  while (begin < e.size()) {
    std::size_t end = begin;
    while (end < e.size() && e[end].voxel == e[begin].voxel) ++end;

    VoxelOutcome outcome;
    outcome.voxel = e[begin].voxel;
    std::uint64_t best_count = 0;
    std::map<std::int32_t, std::uint64_t> owners;
    // Entries for one label are contiguous (sorted by label within a voxel).
    std::size_t i = begin;
    while (i < end) {
      const std::uint16_t label = e[i].label;
      std::uint64_t count = 0;
      bool dynamic = false;
      for (; i < end && e[i].label == label; ++i) {
        ++count;
        if (e[i].dynamic) {
          dynamic = true;
          ++owners[e[i].track];
        }
      }
      // Labels arrive in ascending order, so a later label only wins on a
      // strictly higher count or on an equal count with dynamic support.
      if (count > best_count || (count == best_count && dynamic && !outcome.label_is_dynamic)) {
        best_count = count;
        outcome.label = label;
        outcome.label_is_dynamic = dynamic;
      }
    }
    for (const auto& [track, count] : owners) {
      if (count > outcome.owner_count) {  // ascending ordinal breaks ties
        outcome.owner = track;
        outcome.owner_count = count;
      }
    }
    out.push_back(outcome);
    begin = end;
  }
  return out;
}

float DynamicWeight(double factor, WeightMode mode) {
  return mode == WeightMode::kBasePlusFactor ? static_cast<float>(1.0 + factor)
                                             : static_cast<float>(factor);
}

}  // namespace

GridSpec::GridSpec(const Vec3& min, const Vec3& max, const Vec3& voxel_size)
    : min_(min), max_(max), voxel_size_(voxel_size) {
  constexpr const char* kAxis[3] = {"x", "y", "z"};
  for (int a = 0; a < 3; ++a) {
    if (!std::isfinite(min[a]) || !std::isfinite(max[a]) || !(max[a] > min[a])) {
      throw Error(ErrorCode::kInvalidGridSpec,
                  fmt::format("grid {} range [{}, {}] is empty or non-finite", kAxis[a], min[a], max[a]));
    }
    if (!std::isfinite(voxel_size[a]) || !(voxel_size[a] > 0.0)) {
      throw Error(ErrorCode::kInvalidGridSpec,
                  fmt::format("grid voxel_size.{} = {} must be positive", kAxis[a], voxel_size[a]));
    }
    const double cells = (max[a] - min[a]) / voxel_size[a];
    const double rounded = std::round(cells);
    if (std::abs(cells - rounded) > 1e-9 || rounded < 1.0 || rounded > 65536.0) {
      throw Error(ErrorCode::kInvalidGridSpec,
                  fmt::format("grid span along {} ({} m) is not an integer multiple of voxel size {}",
                              kAxis[a], max[a] - min[a], voxel_size[a]));
    }
    dims_[a] = static_cast<std::uint32_t>(rounded);
  }
  if (voxel_count() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::kInvalidGridSpec, "grid has more voxels than a u32 index can address");
  }
}

GridSpec GridSpec::Base() {
  return {Vec3(-51.2, -51.2, -5.0), Vec3(51.2, 51.2, 3.0), Vec3(0.8, 0.8, 0.8)};
}

GridSpec GridSpec::Large() {
  return {Vec3(-51.2, -51.2, -5.0), Vec3(51.2, 51.2, 3.0), Vec3(0.4, 0.4, 0.5)};
}

VoxelCoord GridSpec::Unlinear(std::uint32_t index) const {
  const std::uint32_t iz = index % dims_[2];
  const std::uint32_t rest = index / dims_[2];
  return {rest / dims_[1], rest % dims_[1], iz};
}

std::optional<VoxelCoord> VoxelIndex(const GridSpec& spec, const Vec3& p) {
  VoxelCoord c{};
  for (int a = 0; a < 3; ++a) {
    if (!(p[a] >= spec.min()[a] && p[a] < spec.max()[a])) return std::nullopt;
    const double cell = std::floor((p[a] - spec.min()[a]) / spec.voxel_size()[a]);
    // Rounding can push a point just below max onto the next cell.
    c[a] = std::min(static_cast<std::uint32_t>(cell), spec.dims()[a] - 1);
  }
  return c;
}

std::size_t LdoGrid::occupied_count() const {
  return static_cast<std::size_t>(
      std::count_if(labels.begin(), labels.end(), [](std::uint16_t l) { return l != kEmpty; }));
}

std::vector<std::uint16_t> VoxelizeLabels(const DenseCloud& cloud, const GridSpec& spec,
                                          const VoxelizeOptions& options) {
  return VoxelizeCloud(cloud, spec, options).labels;
}

std::map<std::string, std::map<std::uint32_t, double>> DensityFactors(const DenseCloud& cloud,
                                                                      const GridSpec& spec) {
  const Entries data = CollectEntries(cloud, spec, 1, 1);
  std::vector<std::map<std::uint32_t, std::uint64_t>> counts(data.tracks.size());
  for (const Entry& e : data.entries) {
    if (e.track >= 0) ++counts[e.track][e.voxel];
  }
  std::map<std::string, std::map<std::uint32_t, double>> factors;
  for (std::size_t t = 0; t < data.tracks.size(); ++t) {
    if (data.track_totals[t] == 0) continue;
    auto& per_voxel = factors[data.tracks[t]];
    for (const auto& [voxel, count] : counts[t]) {
      per_voxel[voxel] = static_cast<double>(count) / static_cast<double>(data.track_totals[t]);
    }
  }
  return factors;
}

std::vector<float> DensityMatrix(const DenseCloud& cloud, const GridSpec& spec,
                                 const VoxelizeOptions& options) {
  const Entries data = CollectEntries(cloud, spec, options.background_class, options.jobs);
  std::vector<float> weights(spec.voxel_count(), 0.0f);
  for (const VoxelOutcome& v : Summarize(data)) {
    if (v.owner < 0) {
      weights[v.voxel] = 1.0f;
    } else {
      const double factor = static_cast<double>(v.owner_count) /
                            static_cast<double>(data.track_totals[v.owner]);
      weights[v.voxel] = DynamicWeight(factor, options.weight_mode);
    }
  }
  return weights;
}

LdoGrid VoxelizeCloud(const DenseCloud& cloud, const GridSpec& spec,
                      const VoxelizeOptions& options) {
  const Entries data = CollectEntries(cloud, spec, options.background_class, options.jobs);
  LdoGrid grid(spec);
  for (const VoxelOutcome& v : Summarize(data)) {
    grid.labels[v.voxel] = v.label;
    if (v.label_is_dynamic) {
      const double factor = static_cast<double>(v.owner_count) /
                            static_cast<double>(data.track_totals[v.owner]);
      grid.weights[v.voxel] = DynamicWeight(factor, options.weight_mode);
    } else {
      grid.weights[v.voxel] = 1.0f;
    }
  }
  return grid;
}

LdoGrid BuildLdo(const SceneSequence& scene, const GridSpec& spec, double margin,
                 const VoxelizeOptions& options) {
  if (options.background_class == kEmpty || options.background_class >= scene.class_count) {
    throw Error(ErrorCode::kInvariantViolation,
                fmt::format("background class {} outside [1, {})", options.background_class,
                            scene.class_count));
  }
  const DenseCloud cloud = BuildDenseCloud(scene, margin, options.jobs);
  LdoGrid grid = VoxelizeCloud(cloud, spec, options);
  ValidateLdo(grid);
  return grid;
}

void ValidateLdo(const LdoGrid& grid) {
  const std::size_t n = grid.spec.voxel_count();
  if (grid.labels.size() != n || grid.weights.size() != n) {
    throw Error(ErrorCode::kInvariantViolation,
                fmt::format("grid arrays hold {} labels / {} weights for {} voxels",
                            grid.labels.size(), grid.weights.size(), n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const float w = grid.weights[i];
    if (!std::isfinite(w) || w < 0.0f || ((grid.labels[i] == kEmpty) != (w == 0.0f))) {
      throw Error(ErrorCode::kInvariantViolation,
                  fmt::format("voxel {} has label {} with weight {}", i, grid.labels[i], w));
    }
  }
}

std::vector<char> EncodeOcc(const LdoGrid& grid) {
  ValidateLdo(grid);
  const std::size_t nnz = grid.occupied_count();
  io::ByteWriter out;
  out.Reserve(4 + 4 + 9 * 8 + 3 * 4 + 8 + nnz * kOccRecordBytes);
  out.PutBytes(std::string_view(kOccMagic, 4));
  out.Put<std::uint32_t>(kOccVersion);
  for (const Vec3* v : {&grid.spec.min(), &grid.spec.max(), &grid.spec.voxel_size()}) {
    for (int a = 0; a < 3; ++a) out.Put<double>((*v)[a]);
  }
  for (std::uint32_t d : grid.spec.dims()) out.Put<std::uint32_t>(d);
  out.Put<std::uint64_t>(nnz);
  for (std::size_t i = 0; i < grid.labels.size(); ++i) {
    if (grid.labels[i] == kEmpty) continue;
    out.Put<std::uint32_t>(static_cast<std::uint32_t>(i));
    out.Put<std::uint16_t>(grid.labels[i]);
    out.Put<float>(grid.weights[i]);
  }
  return out.bytes();
}

LdoGrid DecodeOcc(std::span<const char> bytes, const std::string& source) {
  io::ByteReader in(bytes, source);
  if (in.GetBytes(4, "magic") != std::string_view(kOccMagic, 4)) {
    throw Error(ErrorCode::kBadMagic, source + ": expected magic 'LDOC'");
  }
  const auto version = in.Get<std::uint32_t>("version");
  if (version != kOccVersion) {
    throw Error(ErrorCode::kBadVersion,
                fmt::format("{}: version {} (supported: {})", source, version, kOccVersion));
  }
  Vec3 fields[3];
  for (Vec3& v : fields) {
    for (int a = 0; a < 3; ++a) v[a] = in.Get<double>("grid_spec");
  }
  VoxelCoord dims{};
  for (auto& d : dims) d = in.Get<std::uint32_t>("dims");

  std::optional<GridSpec> spec;
  try {
    spec.emplace(fields[0], fields[1], fields[2]);
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvariantViolation, source + ": " + e.what());
  }
  if (spec->dims() != dims) {
    throw Error(ErrorCode::kInvariantViolation,
                fmt::format("{}: stored dims [{}, {}, {}] disagree with the grid spec [{}, {}, {}]",
                            source, dims[0], dims[1], dims[2], spec->dims()[0], spec->dims()[1],
                            spec->dims()[2]));
  }
  const auto nnz = in.Get<std::uint64_t>("nnz");
  if (nnz > spec->voxel_count() || in.remaining() != nnz * kOccRecordBytes) {
    throw Error(ErrorCode::kTruncatedFile,
                fmt::format("{}: nnz {} needs {} payload bytes, found {}", source, nnz,
                            nnz * kOccRecordBytes, in.remaining()));
  }

  LdoGrid grid(*spec);
  std::int64_t previous = -1;
  for (std::uint64_t r = 0; r < nnz; ++r) {
    const auto index = in.Get<std::uint32_t>("index");
    const auto label = in.Get<std::uint16_t>("label");
    const auto weight = in.Get<float>("weight");
    if (static_cast<std::int64_t>(index) <= previous || index >= spec->voxel_count()) {
      throw Error(ErrorCode::kInvariantViolation,
                  fmt::format("{}: record {} index {} is out of range or out of order", source, r,
                              index));
    }
    if (label == kEmpty || !std::isfinite(weight) || !(weight > 0.0f)) {
      throw Error(ErrorCode::kInvariantViolation,
                  fmt::format("{}: record {} stores label {} with weight {}", source, r, label,
                              weight));
    }
    grid.labels[index] = label;
    grid.weights[index] = weight;
    previous = index;
  }
  return grid;
}

void WriteOcc(const std::filesystem::path& path, const LdoGrid& grid) {
  io::WriteFile(path, EncodeOcc(grid));
}

LdoGrid ReadOcc(const std::filesystem::path& path) {
  const std::vector<char> bytes = io::ReadFile(path);
  return DecodeOcc(bytes, path.string());
}

}  // namespace ldo
