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
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ldo/geometry.hpp"
#include "ldo/ingest.hpp"

namespace ldo {

// A point carried through aggregation together with where it came from.
struct LabeledPoint {
  Vec3 position = Vec3::Zero();
  std::uint16_t label = kUnlabeled;
  std::uint32_t frame = 0;  // position of the source frame in the scene
  std::uint32_t index = 0;  // index within the source frame
};

// One frame partitioned into static points and per-object dynamic groups.
// Coordinates are world coordinates (the frame pose has been applied).
struct SplitFrame {
  std::vector<LabeledPoint> static_points;
  std::map<std::string, std::vector<LabeledPoint>> dynamic_groups;
};

enum class Source : std::uint8_t { kStatic, kDynamic };

struct Provenance {
  Source source = Source::kStatic;
  std::string track_id;  // empty for static points

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

// Aggregated scene in target-frame sensor coordinates.
struct DenseCloud {
  std::vector<LabeledPoint> points;
  std::vector<Provenance> provenance;
  // Dynamic points whose track is not annotated in the target frame.
  std::size_t dropped_points = 0;

  std::size_t size() const { return points.size(); }
};

// Points inside at least one box become dynamic under the box whose center is
// nearest (ties: smallest track_id) and take that box's label. Everything else
// stays static with its own label. `pose` maps the frame into the coordinate
// system the boxes live in.
SplitFrame SplitSemantic(const PointFrame& frame, std::span<const OrientedBox> boxes,
                         double margin, const RigidTransform& pose = RigidTransform::Identity(),
                         std::uint32_t frame_slot = 0);

std::vector<SplitFrame> SplitScene(const SceneSequence& scene, double margin, int jobs = 1);

// Static points of every frame accumulated in world coordinates, then moved
// into the target frame's sensor coordinates.
std::vector<LabeledPoint> AggregateStatic(const SceneSequence& scene,
                                          std::span<const SplitFrame> splits);
std::vector<LabeledPoint> AggregateStatic(const SceneSequence& scene, double margin = 0.0);

// For every track annotated in the target frame: all its observations mapped
// into the box-canonical frame of the box they were observed in, concatenated
// in frame order, and re-placed with the target frame's box. Output is in the
// target frame's sensor coordinates. Tracks absent from the target frame are
// dropped.
std::map<std::string, std::vector<LabeledPoint>> AggregateDynamic(
    const SceneSequence& scene, std::span<const SplitFrame> splits, int jobs = 1);
std::map<std::string, std::vector<LabeledPoint>> AggregateDynamic(const SceneSequence& scene,
                                                                  double margin = 0.0);

// Static points first, ordered by (frame, index); then dynamic points ordered
// by (track_id, frame, index).
DenseCloud BuildDenseCloud(const SceneSequence& scene, double margin = 0.0, int jobs = 1);

}  // namespace ldo
