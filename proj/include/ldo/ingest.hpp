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
#include <span>
#include <string>
#include <vector>

#include "ldo/geometry.hpp"

namespace ldo {

inline constexpr std::uint16_t kUnlabeled = 0xFFFF;

// One LiDAR return in sensor coordinates.
struct LidarPoint {
  float x = 0.0f;
  float y = 0.0f;
  float z = 0.0f;
  float intensity = 0.0f;
  std::uint16_t label = kUnlabeled;

  Vec3 position() const { return {x, y, z}; }
  friend bool operator==(const LidarPoint&, const LidarPoint&) = default;
};

struct PointFrame {
  std::uint32_t frame_index = 0;
  std::vector<LidarPoint> points;
};

// A multi-frame scene. poses[i] maps frame i's sensor coordinates to world
// coordinates. Boxes are annotated in world coordinates, as in the common
// driving benchmarks; this keeps the whole construction covariant under a
// change of world frame.
struct SceneSequence {
  std::string scene_id;
  std::size_t target_frame = 0;
  std::uint16_t class_count = 0;
  std::vector<PointFrame> frames;
  std::vector<RigidTransform> poses;
  std::vector<std::vector<OrientedBox>> boxes;

  std::size_t frame_count() const { return frames.size(); }
};

// Checks every SceneSequence invariant. Throws InvariantViolation naming the
// frame and field at fault.
void ValidateScene(const SceneSequence& scene);

// Point file: "LDOP", u32 version, u64 count, then 18-byte records.
inline constexpr std::size_t kPointHeaderBytes = 16;
inline constexpr std::size_t kPointRecordBytes = 18;

std::vector<LidarPoint> ReadPointFile(const std::filesystem::path& path);
void WritePointFile(const std::filesystem::path& path, std::span<const LidarPoint> points);

SceneSequence LoadScene(const std::filesystem::path& manifest_path);
// Writes manifest.json plus one point file per frame into `dir` (created if
// needed) and returns the manifest path.
std::filesystem::path WriteScene(const SceneSequence& scene, const std::filesystem::path& dir);

}  // namespace ldo
