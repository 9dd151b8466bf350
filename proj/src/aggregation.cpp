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
#include "ldo/aggregation.hpp"

#include <limits>

#include "ldo/parallel.hpp"

namespace ldo {
namespace {

const OrientedBox* FindTrack(std::span<const OrientedBox> boxes, const std::string& track_id) {
  for (const OrientedBox& box : boxes) {
    if (box.track_id == track_id) return &box;
  }
  return nullptr;
}

}  // namespace

SplitFrame SplitSemantic(const PointFrame& frame, std::span<const OrientedBox> boxes,
                         double margin, const RigidTransform& pose, std::uint32_t frame_slot) {
  SplitFrame split;
  for (std::size_t i = 0; i < frame.points.size(); ++i) {
    const LidarPoint& raw = frame.points[i];
    LabeledPoint point{pose.Apply(raw.position()), raw.label, frame_slot,
                       static_cast<std::uint32_t>(i)};

    const OrientedBox* owner = nullptr;
    double best = std::numeric_limits<double>::infinity();
    for (const OrientedBox& box : boxes) {
      if (!box.Contains(point.position, margin)) continue;
      const double d2 = (point.position - box.center).squaredNorm();
      if (d2 < best || (d2 == best && box.track_id < owner->track_id)) {
        best = d2;
        owner = &box;
      }
    }
    if (owner == nullptr) {
      split.static_points.push_back(point);
    } else {
      point.label = owner->label;
      split.dynamic_groups[owner->track_id].push_back(point);
    }
  }
  return split;
}

std::vector<SplitFrame> SplitScene(const SceneSequence& scene, double margin, int jobs) {
  std::vector<SplitFrame> splits(scene.frame_count());
  ParallelFor(scene.frame_count(), jobs, [&](std::size_t i) {
    splits[i] = SplitSemantic(scene.frames[i], scene.boxes[i], margin, scene.poses[i],
                              static_cast<std::uint32_t>(i));
  });
  return splits;
}

std::vector<LabeledPoint> AggregateStatic(const SceneSequence& scene,
                                          std::span<const SplitFrame> splits) {
  std::size_t total = 0;
  for (const SplitFrame& s : splits) total += s.static_points.size();

  // World-frame accumulation over all frames.
  std::vector<LabeledPoint> world;
  world.reserve(total);
  for (const SplitFrame& s : splits) {
    world.insert(world.end(), s.static_points.begin(), s.static_points.end());
  }

  const RigidTransform world_to_target = Invert(scene.poses[scene.target_frame]);
  for (LabeledPoint& p : world) p.position = world_to_target.Apply(p.position);
  return world;
}

std::vector<LabeledPoint> AggregateStatic(const SceneSequence& scene, double margin) {
  return AggregateStatic(scene, SplitScene(scene, margin));
}

std::map<std::string, std::vector<LabeledPoint>> AggregateDynamic(
    const SceneSequence& scene, std::span<const SplitFrame> splits, int jobs) {
  const std::vector<OrientedBox>& target_boxes = scene.boxes[scene.target_frame];
  const RigidTransform world_to_target = Invert(scene.poses[scene.target_frame]);

  std::vector<std::vector<LabeledPoint>> per_track(target_boxes.size());
  ParallelFor(target_boxes.size(), jobs, [&](std::size_t k) {
    const OrientedBox& target_box = target_boxes[k];
    std::vector<LabeledPoint>& out = per_track[k];
    for (std::size_t i = 0; i < splits.size(); ++i) {
      auto group = splits[i].dynamic_groups.find(target_box.track_id);
      if (group == splits[i].dynamic_groups.end()) continue;
      const OrientedBox* observed = FindTrack(scene.boxes[i], target_box.track_id);
      for (LabeledPoint p : group->second) {
        const Vec3 canonical = observed->ToCanonical(p.position);
        p.position = world_to_target.Apply(target_box.FromCanonical(canonical));
        out.push_back(p);
      }
    }
  });

  std::map<std::string, std::vector<LabeledPoint>> result;
  for (std::size_t k = 0; k < target_boxes.size(); ++k) {
    if (!per_track[k].empty()) result.emplace(target_boxes[k].track_id, std::move(per_track[k]));
  }
  return result;
}

std::map<std::string, std::vector<LabeledPoint>> AggregateDynamic(const SceneSequence& scene,
                                                                  double margin) {
  return AggregateDynamic(scene, SplitScene(scene, margin));
}

DenseCloud BuildDenseCloud(const SceneSequence& scene, double margin, int jobs) {
  const std::vector<SplitFrame> splits = SplitScene(scene, margin, jobs);

  DenseCloud cloud;
  cloud.points = AggregateStatic(scene, splits);
  cloud.provenance.assign(cloud.points.size(), Provenance{});

  auto dynamic = AggregateDynamic(scene, splits, jobs);
  for (auto& [track_id, points] : dynamic) {
    cloud.points.insert(cloud.points.end(), points.begin(), points.end());
    cloud.provenance.insert(cloud.provenance.end(), points.size(),
                            Provenance{Source::kDynamic, track_id});
  }

  for (const SplitFrame& s : splits) {
    for (const auto& [track_id, points] : s.dynamic_groups) {
      if (!dynamic.contains(track_id)) cloud.dropped_points += points.size();
    }
  }
  return cloud;
}

}  // namespace ldo
