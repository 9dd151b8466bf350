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

#include <fstream>
#include <functional>

#include <gtest/gtest.h>

#include "ldo/error.hpp"
#include "support/temp_dir.hpp"

namespace ldo {
namespace {

std::pair<ErrorCode, std::string> Failure(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return {e.code(), e.what()};
  }
  ADD_FAILURE() << "no ldo::Error thrown";
  return {ErrorCode::kIoFailure, ""};
}

TEST(ParseConfigTest, EmptyObjectKeepsDefaults) {
  const PipelineConfig c = ParseConfig("{}");
  EXPECT_EQ(c.grid, GridSpec::Base());
  EXPECT_EQ(c.grid.dims(), (VoxelCoord{128, 128, 10}));
  EXPECT_EQ(c.intervals, HeightIntervalSet::Default());
  EXPECT_EQ(c.beta, 0.9);
  EXPECT_EQ(c.margin, 0.0);
  EXPECT_EQ(c.class_count, 18);
  EXPECT_EQ(c.background_class, 1);
  EXPECT_EQ(c.weight_mode, WeightMode::kBasePlusFactor);
}

TEST(ParseConfigTest, ReadsEveryKey) {
  const PipelineConfig c = ParseConfig(R"({
    "grid": {"voxel_size": [0.4, 0.4, 0.5]},
    "intervals": [[-1, 1, "BL"], [-5, 3, "UL"], [-6, -4, "EFL"]],
    "margin": 0.1, "beta": 0.5, "class_count": 20, "background_class": 7,
    "weight_mode": "factor_only"})");
  EXPECT_EQ(c.grid.dims(), (VoxelCoord{256, 256, 16}));
  ASSERT_EQ(c.intervals.size(), 3u);
  EXPECT_EQ(c.intervals.intervals()[2].layer, Layer::kExtendedFocus);
  EXPECT_EQ(c.margin, 0.1);
  EXPECT_EQ(c.beta, 0.5);
  EXPECT_EQ(c.class_count, 20);
  EXPECT_EQ(c.background_class, 7);
  EXPECT_EQ(c.weight_mode, WeightMode::kFactorOnly);
  const VoxelizeOptions v = c.voxelize_options(4);
  EXPECT_EQ(v.background_class, 7);
  EXPECT_EQ(v.jobs, 4);
}

TEST(ParseConfigTest, DumpRoundTrips) {
  PipelineConfig c = ParseConfig(R"({"margin": 0.25, "weight_mode": "factor_only"})");
  const PipelineConfig back = ParseConfig(DumpConfig(c));
  EXPECT_EQ(back.grid, c.grid);
  EXPECT_EQ(back.intervals, c.intervals);
  EXPECT_EQ(back.margin, c.margin);
  EXPECT_EQ(back.weight_mode, c.weight_mode);
}

TEST(ParseConfigTest, NonIntegralGridSpan) {
  const auto [code, msg] =
      Failure([] { ParseConfig(R"({"grid": {"voxel_size": [0.7, 0.8, 0.8]}})", "cfg.json"); });
  EXPECT_EQ(code, ErrorCode::kInvalidGridSpec);
  EXPECT_NE(msg.find("cfg.json"), std::string::npos) << msg;
  EXPECT_NE(msg.find("integer multiple"), std::string::npos) << msg;
}

TEST(ParseConfigTest, RejectsBadValues) {
  const char* bad[] = {
      "[1, 2]",
      "{nope",
      R"({"colour": 1})",
      R"({"grid": {"min": [0, 0]}})",
      R"({"grid": {"origin": [0, 0, 0]}})",
      R"({"intervals": []})",
      R"({"intervals": [[1, 0, "BL"]]})",
      R"({"intervals": [[0, 1, "XL"]]})",
      R"({"intervals": [[0, 1]]})",
      R"({"margin": -1})",
      R"({"beta": "high"})",
      R"({"class_count": 1})",
      R"({"class_count": 2.5})",
      R"({"background_class": 0})",
      R"({"background_class": 18})",
      R"({"weight_mode": "other"})",
  };
  for (const char* text : bad) {
    const auto [code, msg] = Failure([&] { ParseConfig(text, "c.json"); });
    EXPECT_EQ(code, ErrorCode::kMalformedConfig) << text << " -> " << msg;
  }
}

TEST(ParseConfigTest, ErrorNamesTheKey) {
  const auto [code, msg] = Failure([] { ParseConfig(R"({"weight_mode": 3})", "c.json"); });
  EXPECT_NE(msg.find("weight_mode"), std::string::npos) << msg;
}

TEST(LoadConfigTest, ReadsFileAndReportsMissing) {
  testing::TempDir dir;
  std::ofstream(dir / "c.json") << R"({"beta": 0.7})";
  EXPECT_EQ(LoadConfig(dir / "c.json").beta, 0.7);
  const auto [code, msg] = Failure([&] { LoadConfig(dir / "missing.json"); });
  EXPECT_EQ(code, ErrorCode::kIoFailure);
  EXPECT_NE(msg.find("missing.json"), std::string::npos);
}

}  // namespace
}  // namespace ldo
