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
#include "ldo/ingest.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "binary_io.hpp"
#include "ldo/error.hpp"

namespace ldo {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr char kPointMagic[4] = {'L', 'D', 'O', 'P'};
constexpr std::uint32_t kPointVersion = 1;

[[noreturn]] void Malformed(const std::string& file, const std::string& field,
                            const std::string& what) {
  throw Error(ErrorCode::kMalformedManifest, fmt::format("{}: field '{}' {}", file, field, what));
}

const json& Field(const json& obj, const char* key, const std::string& file,
                  const std::string& where) {
  if (!obj.is_object()) Malformed(file, where, "is not an object");
  auto it = obj.find(key);
  if (it == obj.end()) Malformed(file, where + "." + key, "is missing");
  return *it;
}

double GetDouble(const json& value, const std::string& file, const std::string& field) {
  if (!value.is_number()) Malformed(file, field, "must be a number");
  const double d = value.get<double>();
  if (!std::isfinite(d)) Malformed(file, field, "must be finite");
  return d;
}

std::uint64_t GetUnsigned(const json& value, const std::string& file,
                          const std::string& field, std::uint64_t max) {
  if (!value.is_number_integer() || (value.is_number_integer() && !value.is_number_unsigned() &&
                                     value.get<std::int64_t>() < 0)) {
    Malformed(file, field, "must be a non-negative integer");
  }
  const auto v = value.get<std::uint64_t>();
  if (v > max) Malformed(file, field, fmt::format("exceeds {}", max));
  return v;
}

template <int N>
Eigen::Matrix<double, N, 1> GetVector(const json& value, const std::string& file,
                                      const std::string& field) {
  if (!value.is_array() || value.size() != N) {
    Malformed(file, field, fmt::format("must be an array of {} numbers", N));
  }
  Eigen::Matrix<double, N, 1> out;
  for (int i = 0; i < N; ++i) out[i] = GetDouble(value[i], file, fmt::format("{}[{}]", field, i));
  return out;
}

OrientedBox ParseBox(const json& j, const std::string& file, const std::string& where) {
  const json& id = Field(j, "track_id", file, where);
  if (!id.is_string()) Malformed(file, where + ".track_id", "must be a string");
  const auto label = static_cast<std::uint16_t>(
      GetUnsigned(Field(j, "label", file, where), file, where + ".label", 0xFFFF));
  try {
    return OrientedBox(GetVector<3>(Field(j, "center", file, where), file, where + ".center"),
                       GetVector<3>(Field(j, "size", file, where), file, where + ".size"),
                       GetDouble(Field(j, "yaw", file, where), file, where + ".yaw"),
                       id.get<std::string>(), label);
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvariantViolation, fmt::format("{}: {}: {}", file, where, e.what()));
  }
}

RigidTransform ParsePose(const json& j, const std::string& file, const std::string& where) {
  const Eigen::Vector4d q = GetVector<4>(Field(j, "quaternion", file, where), file,
                                         where + ".quaternion");
  const Vec3 t = GetVector<3>(Field(j, "translation", file, where), file, where + ".translation");
  const double norm = q.norm();
  if (norm < 1e-6) Malformed(file, where + ".quaternion", "has zero norm");
  return {Quat(q[0], q[1], q[2], q[3]), t};
}

json VectorJson(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

}  // namespace

void ValidateScene(const SceneSequence& scene) {
  auto fail = [&](const std::string& msg) {
    throw Error(ErrorCode::kInvariantViolation, fmt::format("scene '{}': {}", scene.scene_id, msg));
  };
  const std::size_t n = scene.frames.size();
  if (n == 0) fail("frames list is empty");
  if (scene.poses.size() != n) {
    fail(fmt::format("{} frames but {} poses", n, scene.poses.size()));
  }
  if (scene.boxes.size() != n) {
    fail(fmt::format("{} frames but {} box lists", n, scene.boxes.size()));
  }
  if (scene.target_frame >= n) {
    fail(fmt::format("target_frame {} out of range for {} frames", scene.target_frame, n));
  }
  if (scene.class_count < 2) fail("class_count must be at least 2 (EMPTY plus one class)");

  std::map<std::string, std::uint16_t> track_labels;
  for (std::size_t i = 0; i < n; ++i) {
    const PointFrame& frame = scene.frames[i];
    if (i > 0 && frame.frame_index <= scene.frames[i - 1].frame_index) {
      fail(fmt::format("frames[{}].index {} is not strictly increasing", i, frame.frame_index));
    }
    for (std::size_t p = 0; p < frame.points.size(); ++p) {
      const LidarPoint& pt = frame.points[p];
      if (!std::isfinite(pt.x) || !std::isfinite(pt.y) || !std::isfinite(pt.z) ||
          !std::isfinite(pt.intensity)) {
        fail(fmt::format("frames[{}].points[{}] has a non-finite value", i, p));
      }
      if (pt.label != kUnlabeled && pt.label >= scene.class_count) {
        fail(fmt::format("frames[{}].points[{}].label {} >= class_count {}", i, p, pt.label,
                         scene.class_count));
      }
    }
    std::set<std::string> seen;
    for (const OrientedBox& box : scene.boxes[i]) {
      if (!seen.insert(box.track_id).second) {
        fail(fmt::format("frames[{}] repeats track_id '{}'", i, box.track_id));
      }
      if (box.label == 0 || box.label >= scene.class_count) {
        fail(fmt::format("frames[{}] box '{}' label {} outside [1, {})", i, box.track_id,
                         box.label, scene.class_count));
      }
      auto [it, inserted] = track_labels.emplace(box.track_id, box.label);
      if (!inserted && it->second != box.label) {
        fail(fmt::format("track '{}' changes label {} -> {} at frames[{}]", box.track_id,
                         it->second, box.label, i));
      }
    }
  }
}

std::vector<LidarPoint> ReadPointFile(const fs::path& path) {
  const std::vector<char> bytes = io::ReadFile(path);
  io::ByteReader in(bytes, path.string());
  const std::string magic = in.GetBytes(4, "magic");
  if (magic != std::string_view(kPointMagic, 4)) {
    throw Error(ErrorCode::kBadMagic, path.string() + ": expected magic 'LDOP'");
  }
  const auto version = in.Get<std::uint32_t>("version");
  if (version != kPointVersion) {
    throw Error(ErrorCode::kBadVersion,
                fmt::format("{}: version {} (supported: {})", path.string(), version, kPointVersion));
  }
  const auto count = in.Get<std::uint64_t>("record_count");
  if (count > in.remaining() / kPointRecordBytes || in.remaining() != count * kPointRecordBytes) {
    throw Error(ErrorCode::kTruncatedFile,
                fmt::format("{}: record_count {} needs {} payload bytes, found {}", path.string(),
                            count, count * kPointRecordBytes, in.remaining()));
  }
  std::vector<LidarPoint> points(count);
  for (LidarPoint& p : points) {
    p.x = in.Get<float>("x");
    p.y = in.Get<float>("y");
    p.z = in.Get<float>("z");
    p.intensity = in.Get<float>("intensity");
    p.label = in.Get<std::uint16_t>("semantic_label");
  }
  return points;
}

void WritePointFile(const fs::path& path, std::span<const LidarPoint> points) {
  io::ByteWriter out;
  out.Reserve(kPointHeaderBytes + points.size() * kPointRecordBytes);
  out.PutBytes(std::string_view(kPointMagic, 4));
  out.Put<std::uint32_t>(kPointVersion);
  out.Put<std::uint64_t>(points.size());
  for (const LidarPoint& p : points) {
    out.Put(p.x);
    out.Put(p.y);
    out.Put(p.z);
    out.Put(p.intensity);
    out.Put(p.label);
  }
  io::WriteFile(path, out.bytes());
}

SceneSequence LoadScene(const fs::path& manifest_path) {
  const std::string file = manifest_path.string();
  std::ifstream in(manifest_path);
  if (!in) throw Error(ErrorCode::kIoFailure, file + ": cannot open manifest");

  json root;
  try {
    root = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedManifest, file + ": " + e.what());
  }

  SceneSequence scene;
  const json& id = Field(root, "scene_id", file, "$");
  if (!id.is_string()) Malformed(file, "scene_id", "must be a string");
  scene.scene_id = id.get<std::string>();
  scene.target_frame = GetUnsigned(Field(root, "target_frame", file, "$"), file, "target_frame",
                                   std::numeric_limits<std::uint32_t>::max());
  scene.class_count = static_cast<std::uint16_t>(
      GetUnsigned(Field(root, "class_count", file, "$"), file, "class_count", 0xFFFF));

  const json& frames = Field(root, "frames", file, "$");
  if (!frames.is_array()) Malformed(file, "frames", "must be an array");
  if (frames.empty()) Malformed(file, "frames", "must not be empty");

  const fs::path base = manifest_path.parent_path();
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const std::string where = fmt::format("frames[{}]", i);
    const json& f = frames[i];
    PointFrame frame;
    frame.frame_index = static_cast<std::uint32_t>(
        GetUnsigned(Field(f, "index", file, where), file, where + ".index",
                    std::numeric_limits<std::uint32_t>::max()));
    const json& points_path = Field(f, "points_path", file, where);
    if (!points_path.is_string()) Malformed(file, where + ".points_path", "must be a string");
    frame.points = ReadPointFile(base / points_path.get<std::string>());
    // A frame without a pose surfaces as a frame/pose count mismatch below.
    if (auto it = f.find("pose"); it != f.end()) {
      scene.poses.push_back(ParsePose(*it, file, where + ".pose"));
    }

    std::vector<OrientedBox> boxes;
    if (auto it = f.find("boxes"); it != f.end()) {
      if (!it->is_array()) Malformed(file, where + ".boxes", "must be an array");
      for (std::size_t b = 0; b < it->size(); ++b) {
        boxes.push_back(ParseBox((*it)[b], file, fmt::format("{}.boxes[{}]", where, b)));
      }
    }
    scene.boxes.push_back(std::move(boxes));
    scene.frames.push_back(std::move(frame));
  }

  try {
    ValidateScene(scene);
  } catch (const Error& e) {
    throw Error(e.code(), file + ": " + e.what());
  }
  return scene;
}

fs::path WriteScene(const SceneSequence& scene, const fs::path& dir) {
  ValidateScene(scene);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorCode::kIoFailure, dir.string() + ": cannot create directory");
  }

  json frames = json::array();
  for (std::size_t i = 0; i < scene.frames.size(); ++i) {
    const std::string name = fmt::format("frame_{:04d}.ldop", i);
    WritePointFile(dir / name, scene.frames[i].points);

    const RigidTransform& pose = scene.poses[i];
    const Quat& q = pose.rotation();
    json boxes = json::array();
    for (const OrientedBox& b : scene.boxes[i]) {
      boxes.push_back({{"track_id", b.track_id},
                       {"label", b.label},
                       {"center", VectorJson(b.center)},
                       {"size", VectorJson(b.size)},
                       {"yaw", b.yaw}});
    }
    frames.push_back({{"index", scene.frames[i].frame_index},
                      {"points_path", name},
                      {"pose",
                       {{"quaternion", json::array({q.w(), q.x(), q.y(), q.z()})},
                        {"translation", VectorJson(pose.translation())}}},
                      {"boxes", std::move(boxes)}});
  }
  json root = {{"scene_id", scene.scene_id},
               {"target_frame", scene.target_frame},
               {"class_count", scene.class_count},
               {"frames", std::move(frames)}};

  const fs::path manifest = dir / "manifest.json";
  const std::string text = root.dump(2) + "\n";
  io::WriteFile(manifest, text);
  return manifest;
}

}  // namespace ldo
