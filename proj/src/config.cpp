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
#include "ldo/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "ldo/error.hpp"

namespace ldo {
namespace {

using nlohmann::json;

[[noreturn]] void Bad(const std::string& source, const std::string& key, const std::string& what) {
  throw Error(ErrorCode::kMalformedConfig, fmt::format("{}: '{}' {}", source, key, what));
}

double Number(const json& j, const std::string& source, const std::string& key) {
  if (!j.is_number()) Bad(source, key, "must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) Bad(source, key, "must be finite");
  return v;
}

std::uint16_t Small(const json& j, const std::string& source, const std::string& key) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0 || j.get<std::int64_t>() > 0xFFFE) {
    Bad(source, key, "must be an integer in [0, 65534]");
  }
  return static_cast<std::uint16_t>(j.get<std::int64_t>());
}

Vec3 Triple(const json& j, const std::string& source, const std::string& key) {
  if (!j.is_array() || j.size() != 3) Bad(source, key, "must be an array of 3 numbers");
  return {Number(j[0], source, key + "[0]"), Number(j[1], source, key + "[1]"),
          Number(j[2], source, key + "[2]")};
}

json TripleJson(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

}  // namespace

PipelineConfig ParseConfig(const std::string& text, const std::string& source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedConfig, source + ": " + e.what());
  }
  if (!root.is_object()) Bad(source, "$", "must be an object");

  PipelineConfig config;
  for (const auto& [key, value] : root.items()) {
    if (key == "grid") {
      if (!value.is_object()) Bad(source, key, "must be an object");
      Vec3 min = config.grid.min(), max = config.grid.max(), size = config.grid.voxel_size();
      for (const auto& [sub, v] : value.items()) {
        if (sub == "min") min = Triple(v, source, "grid.min");
        else if (sub == "max") max = Triple(v, source, "grid.max");
        else if (sub == "voxel_size") size = Triple(v, source, "grid.voxel_size");
        else Bad(source, "grid." + sub, "is not a known key");
      }
      try {
        config.grid = GridSpec(min, max, size);
      } catch (const Error& e) {
        throw Error(e.code(), fmt::format("{}: 'grid': {}", source, e.what()));
      }
    } else if (key == "intervals") {
      if (!value.is_array()) Bad(source, key, "must be an array");
      std::vector<HeightInterval> intervals;
      for (std::size_t i = 0; i < value.size(); ++i) {
        const std::string name = fmt::format("intervals[{}]", i);
        const json& t = value[i];
        if (!t.is_array() || t.size() != 3 || !t[2].is_string()) {
          Bad(source, name, "must be [z_min, z_max, layer]");
        }
        try {
          intervals.push_back({Number(t[0], source, name), Number(t[1], source, name),
                               ParseLayer(t[2].get<std::string>())});
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kMalformedConfig) throw;
          throw Error(e.code(), fmt::format("{}: '{}': {}", source, name, e.what()));
        }
      }
      try {
        config.intervals = HeightIntervalSet(std::move(intervals));
      } catch (const Error& e) {
        throw Error(ErrorCode::kMalformedConfig, fmt::format("{}: 'intervals': {}", source, e.what()));
      }
    } else if (key == "margin") {
      config.margin = Number(value, source, key);
      if (config.margin < 0.0) Bad(source, key, "must be non-negative");
    } else if (key == "beta") {
      config.beta = Number(value, source, key);
    } else if (key == "class_count") {
      config.class_count = Small(value, source, key);
    } else if (key == "background_class") {
      config.background_class = Small(value, source, key);
    } else if (key == "weight_mode") {
      const std::string mode = value.is_string() ? value.get<std::string>() : "";
      if (mode == "base_plus_factor") config.weight_mode = WeightMode::kBasePlusFactor;
      else if (mode == "factor_only") config.weight_mode = WeightMode::kFactorOnly;
      else Bad(source, key, "must be \"base_plus_factor\" or \"factor_only\"");
    } else {
      Bad(source, key, "is not a known key");
    }
  }
  if (config.class_count < 2) Bad(source, "class_count", "must be at least 2");
  if (config.background_class == kEmpty || config.background_class >= config.class_count) {
    Bad(source, "background_class", fmt::format("must lie in [1, {})", config.class_count));
  }
  return config;
}

PipelineConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoFailure, path.string() + ": cannot open config");
  std::ostringstream text;
  text << in.rdbuf();
  return ParseConfig(text.str(), path.string());
}

std::string DumpConfig(const PipelineConfig& config) {
  json intervals = json::array();
  for (const HeightInterval& iv : config.intervals.intervals()) {
    intervals.push_back(json::array({iv.z_min, iv.z_max, std::string(ToString(iv.layer))}));
  }
  json root = {
      {"grid",
       {{"min", TripleJson(config.grid.min())},
        {"max", TripleJson(config.grid.max())},
        {"voxel_size", TripleJson(config.grid.voxel_size())}}},
      {"intervals", intervals},
      {"margin", config.margin},
      {"beta", config.beta},
      {"class_count", config.class_count},
      {"background_class", config.background_class},
      {"weight_mode",
       config.weight_mode == WeightMode::kBasePlusFactor ? "base_plus_factor" : "factor_only"}};
  return root.dump(2) + "\n";
}

}  // namespace ldo
