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
#include "ldo/heights.hpp"

#include <functional>
#include <random>

#include <gtest/gtest.h>

#include "ldo/error.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

namespace ldo {
namespace {

using testing::Rng;

// Six 1 m slices with centers -2.5, -1.5, ..., 2.5.
GridSpec SixSlices() { return {Vec3(0, 0, -3), Vec3(4, 5, 3), Vec3(1, 1, 1)}; }

FeatureGrid Slice(const FeatureGrid& volume, std::size_t iz) {
  const std::size_t c = volume.dim(0), h = volume.dim(2), w = volume.dim(3);
  FeatureGrid out({c, h, w});
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) out(ch, y, x) = volume(ch, iz, y, x);
    }
  }
  return out;
}

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIoFailure;
}

TEST(HeightIntervalSetTest, DefaultIntervals) {
  const HeightIntervalSet set = HeightIntervalSet::Default();
  const std::vector<std::pair<double, double>> expected = {
      {-3, -2}, {-2, -1}, {-1, 0}, {0, 2}, {-5, 3}, {-4, 2}, {-6, -4}, {-2, 1}};
  ASSERT_EQ(set.size(), 8u);
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_EQ(set.intervals()[i].z_min, expected[i].first);
    EXPECT_EQ(set.intervals()[i].z_max, expected[i].second);
  }
  const auto bl = set.InLayer(Layer::kBase);
  ASSERT_EQ(bl.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(bl[i], set.intervals()[i]);

  const auto ul = set.InLayer(Layer::kUniversal);
  ASSERT_EQ(ul.size(), 2u);
  EXPECT_EQ(ul[0].z_min, -5.0);
  EXPECT_EQ(ul[1].z_min, -2.0);
  EXPECT_EQ(ul[1].z_max, 1.0);

  const auto efl = set.InLayer(Layer::kExtendedFocus);
  ASSERT_EQ(efl.size(), 2u);
  EXPECT_EQ(efl[0].z_max, 2.0);
  EXPECT_EQ(efl[1].z_min, -6.0);
  EXPECT_EQ(efl[1].z_max, -4.0);
}

TEST(HeightIntervalSetTest, RejectsEmptyIntervals) {
  EXPECT_THROW(HeightIntervalSet({}), Error);
  EXPECT_THROW(HeightIntervalSet({{1.0, 1.0, Layer::kBase}}), Error);
  EXPECT_THROW(HeightIntervalSet({{2.0, 1.0, Layer::kBase}}), Error);
}

TEST(LayerTest, ParseAndPrint) {
  for (Layer l : {Layer::kBase, Layer::kUniversal, Layer::kExtendedFocus}) {
    EXPECT_EQ(ParseLayer(ToString(l)), l);
  }
  EXPECT_EQ(CodeOf([] { ParseLayer("SE"); }), ErrorCode::kMalformedConfig);
}

TEST(HeightHistogramTest, EmptyGrid) {
  const HeightHistogram h = ComputeHeightHistogram(LdoGrid(GridSpec::Base()), 0.5);
  EXPECT_EQ(h.counts.size(), 16u);
  for (std::uint64_t c : h.counts) EXPECT_EQ(c, 0u);
  EXPECT_EQ(h.origin, -5.0);
}

TEST(HeightHistogramTest, SingleVoxelAtSliceZero) {
  LdoGrid grid(GridSpec::Base());
  const std::uint32_t v = grid.spec.Linear({40, 70, 0});
  grid.labels[v] = 3;
  grid.weights[v] = 1.0f;
  const HeightHistogram h = ComputeHeightHistogram(grid, 0.5);
  std::size_t nonzero = 0;
  for (std::uint64_t c : h.counts) nonzero += c != 0;
  EXPECT_EQ(nonzero, 1u);
  EXPECT_EQ(h.counts[0], 1u);  // slice center -4.6 lies in [-5.0, -4.5)
}

TEST(HeightHistogramTest, MatchesPerVoxelTally) {
  Rng rng(1);
  for (double bin : {0.5, 0.8, 1.3, 3.0}) {
    LdoGrid grid(GridSpec::Base());
    std::bernoulli_distribution occupied(0.05);
    for (std::size_t i = 0; i < grid.labels.size(); ++i) {
      if (occupied(rng)) {
        grid.labels[i] = 2;
        grid.weights[i] = 1.0f;
      }
    }
    const HeightHistogram h = ComputeHeightHistogram(grid, bin);
    std::vector<std::uint64_t> tally(h.counts.size(), 0);
    for (std::size_t i = 0; i < grid.labels.size(); ++i) {
      if (grid.labels[i] == kEmpty) continue;
      const double zc = -5.0 + 0.8 * (static_cast<double>(i % 10) + 0.5);
      std::size_t b = 0;
      while (b + 1 < tally.size() && zc >= -5.0 + (b + 1) * bin) ++b;
      ++tally[b];
    }
    EXPECT_EQ(h.counts, tally) << bin;
    std::uint64_t total = 0;
    for (std::uint64_t c : h.counts) total += c;
    EXPECT_EQ(total, grid.occupied_count());
  }
}

TEST(HeightHistogramTest, FormatsOneLinePerBin) {
  LdoGrid grid(GridSpec::Base());
  grid.labels[grid.spec.Linear({0, 0, 9})] = 4;
  grid.weights[grid.spec.Linear({0, 0, 9})] = 1.0f;
  const std::vector<std::string> lines = FormatHistogram(ComputeHeightHistogram(grid, 2.0));
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0], "[-5.000, -3.000) 0");
  EXPECT_EQ(lines[3], "[1.000, 3.000) 1");
}

TEST(LayerCoverageTest, BaseGridSlices) {
  // One occupied voxel per slice; centers -4.6, -3.8, ..., 2.6.
  LdoGrid grid(GridSpec::Base());
  for (std::uint32_t iz = 0; iz < 10; ++iz) {
    grid.labels[grid.spec.Linear({1, 1, iz})] = 2;
    grid.weights[grid.spec.Linear({1, 1, iz})] = 1.0f;
  }
  const HeightIntervalSet set = HeightIntervalSet::Default();
  EXPECT_DOUBLE_EQ(LayerCoverage(grid, set, Layer::kBase), 0.7);
  EXPECT_DOUBLE_EQ(LayerCoverage(grid, set, Layer::kUniversal), 1.0);
  EXPECT_DOUBLE_EQ(LayerCoverage(grid, set, Layer::kExtendedFocus), 0.9);
  EXPECT_EQ(LayerCoverage(LdoGrid(GridSpec::Base()), set, Layer::kBase), 0.0);
}

TEST(VhsPoolTest, FullRangeEqualsGlobalPool) {
  Rng rng(2);
  const GridSpec spec = SixSlices();
  const FeatureGrid f = testing::RandomTensor(rng, {3, 6, 4, 5});
  EXPECT_EQ(VhsPool(f, -3.0, 3.0, spec), GlobalPool(f));
  EXPECT_EQ(VhsPool(f, -100.0, 100.0, spec), GlobalPool(f));
}

TEST(VhsPoolTest, SingleSliceVerbatim) {
  Rng rng(3);
  const FeatureGrid f = testing::RandomTensor(rng, {2, 6, 4, 5});
  EXPECT_EQ(VhsPool(f, 0.0, 1.0, SixSlices()), Slice(f, 3));
  EXPECT_EQ(VhsPool(f, 0.4, 0.6, SixSlices()), Slice(f, 3));
}

TEST(VhsPoolTest, TwoSlicesMatchLoopSum) {
  Rng rng(4);
  const FeatureGrid f = testing::RandomTensor(rng, {3, 6, 4, 5});
  const FeatureGrid got = VhsPool(f, -1.0, 1.0, SixSlices());
  ASSERT_EQ(got.dims(), (std::vector<std::size_t>{3, 4, 5}));
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t y = 0; y < 4; ++y) {
      for (std::size_t x = 0; x < 5; ++x) EXPECT_EQ(got(c, y, x), f(c, 2, y, x) + f(c, 3, y, x));
    }
  }
}

TEST(VhsPoolTest, SliceCenterMembershipIsHalfOpen) {
  const GridSpec spec = SixSlices();
  EXPECT_EQ(SlicesInInterval(spec, -1.5, 0.5), (std::vector<std::uint32_t>{1, 2}));
  EXPECT_EQ(SlicesInInterval(spec, -1.6, 0.6), (std::vector<std::uint32_t>{1, 2, 3}));
  EXPECT_TRUE(SlicesInInterval(spec, 2.6, 9.0).empty());
}

TEST(VhsPoolTest, Errors) {
  Rng rng(5);
  const FeatureGrid f = testing::RandomTensor(rng, {2, 6, 3, 3});
  EXPECT_EQ(CodeOf([&] { VhsPool(f, -6.0, -4.0, SixSlices()); }), ErrorCode::kEmptyInterval);
  EXPECT_EQ(CodeOf([&] { VhsPool(f, 0.1, 0.2, SixSlices()); }), ErrorCode::kEmptyInterval);
  EXPECT_EQ(CodeOf([&] { VhsPool(f, -1.0, 1.0, GridSpec::Base()); }), ErrorCode::kShapeMismatch);
  EXPECT_EQ(CodeOf([&] { GlobalPool(FeatureGrid({2, 3, 3})); }), ErrorCode::kShapeMismatch);
}

TEST(VhsPoolTest, MeanAndMax) {
  FeatureGrid f({1, 6, 1, 1});
  for (std::size_t z = 0; z < 6; ++z) f(0, z, 0, 0) = static_cast<float>(z * z);
  EXPECT_EQ(VhsPool(f, -1.0, 3.0, SixSlices(), PoolReduction::kMean)[0], (4.0f + 9 + 16 + 25) / 4);
  EXPECT_EQ(VhsPool(f, -1.0, 3.0, SixSlices(), PoolReduction::kMax)[0], 25.0f);
  EXPECT_EQ(VhsPool(f, -1.0, 3.0, SixSlices(), PoolReduction::kSum)[0], 54.0f);
}

TEST(VhsPoolTest, DisjointIntervalsAdd) {
  Rng rng(6);
  const GridSpec spec = GridSpec::Base();
  std::uniform_int_distribution<int> cut(1, 9);
  for (int trial = 0; trial < 50; ++trial) {
    const FeatureGrid f = testing::DyadicTensor(rng, {2, 10, 6, 7});
    const int k = cut(rng);
    const double split = -5.0 + 0.8 * k;
    const FeatureGrid a = VhsPool(f, -5.0, split, spec);
    const FeatureGrid b = VhsPool(f, split, 3.0, spec);
    const FeatureGrid all = VhsPool(f, -5.0, 3.0, spec);
    for (std::size_t i = 0; i < all.size(); ++i) ASSERT_EQ(a[i] + b[i], all[i]) << trial;
  }
}

TEST(GlobalPoolTest, SingleSliceAndZeros) {
  Rng rng(7);
  const FeatureGrid f = testing::RandomTensor(rng, {3, 1, 4, 4});
  EXPECT_EQ(GlobalPool(f), f.Reshaped({3, 4, 4}));
  EXPECT_EQ(GlobalPool(FeatureGrid({2, 5, 3, 3})), FeatureGrid({2, 3, 3}));
}

TEST(VhsAggregateTest, ZeroParamsGiveZeros) {
  Rng rng(8);
  const std::vector<FeatureGrid> pooled = {testing::RandomTensor(rng, {3, 4, 4}),
                                           testing::RandomTensor(rng, {3, 4, 4})};
  EXPECT_EQ(VhsAggregate(pooled, AggregationParams::Zeros(2, 3)), FeatureGrid({3, 4, 4}));
}

TEST(VhsAggregateTest, IdentityProjection) {
  Rng rng(9);
  AggregationParams p = AggregationParams::Zeros(1, 4);
  for (std::size_t c = 0; c < 4; ++c) p.path1_weight(c, c) = 1.0f;
  const std::vector<FeatureGrid> pooled = {testing::RandomTensor(rng, {4, 5, 3})};
  EXPECT_EQ(VhsAggregate(pooled, p), pooled[0]);
}

TEST(VhsAggregateTest, MatchesNestedLoopOracle) {
  Rng rng(10);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t levels = 1 + trial % 4, c = 2 + trial % 3;
    const AggregationParams p = testing::RandomAggregation(rng, levels, c);
    std::vector<FeatureGrid> pooled;
    for (std::size_t l = 0; l < levels; ++l) pooled.push_back(testing::RandomTensor(rng, {c, 4, 4}));
    const FeatureGrid got = VhsAggregate(pooled, p);
    const std::vector<double> want = testing::OracleVhsAggregate(pooled, p);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-5);
  }
}

TEST(VhsAggregateTest, LinearWithoutBias) {
  Rng rng(11);
  AggregationParams p = testing::RandomAggregation(rng, 3, 2);
  for (FeatureGrid* b : {&p.path1_bias, &p.path2_linear_bias, &p.path2_conv_bias}) *b = FeatureGrid({2});
  std::vector<FeatureGrid> x, y, mix;
  const float a = 0.7f, b = -1.3f;
  for (int l = 0; l < 3; ++l) {
    x.push_back(testing::RandomTensor(rng, {2, 5, 5}));
    y.push_back(testing::RandomTensor(rng, {2, 5, 5}));
    FeatureGrid m({2, 5, 5});
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = a * x.back()[i] + b * y.back()[i];
    mix.push_back(m);
  }
  const FeatureGrid fx = VhsAggregate(x, p), fy = VhsAggregate(y, p), fm = VhsAggregate(mix, p);
  for (std::size_t i = 0; i < fm.size(); ++i) EXPECT_NEAR(fm[i], a * fx[i] + b * fy[i], 1e-5);
}

TEST(VhsAggregateTest, ShapeErrors) {
  const AggregationParams p = AggregationParams::Zeros(2, 3);
  const std::vector<FeatureGrid> one = {FeatureGrid({3, 4, 4})};
  EXPECT_EQ(CodeOf([&] { VhsAggregate(one, p); }), ErrorCode::kShapeMismatch);
  const std::vector<FeatureGrid> ragged = {FeatureGrid({3, 4, 4}), FeatureGrid({3, 4, 5})};
  EXPECT_EQ(CodeOf([&] { VhsAggregate(ragged, p); }), ErrorCode::kShapeMismatch);
  AggregationParams bad = p;
  bad.path2_conv_weight = FeatureGrid({3, 3, 1, 1});
  EXPECT_EQ(CodeOf([&] { bad.Validate(); }), ErrorCode::kShapeMismatch);
}

TEST(AggregationParamsTest, BundleRoundTrip) {
  Rng rng(12);
  const AggregationParams p = testing::RandomAggregation(rng, 3, 4);
  const AggregationParams back =
      AggregationParams::FromBundle(DecodeTensorBundle(EncodeTensorBundle(p.ToBundle())));
  EXPECT_EQ(back.path1_weight, p.path1_weight);
  EXPECT_EQ(back.path2_conv_weight, p.path2_conv_weight);
  EXPECT_EQ(back.levels(), 3u);
  TensorBundle missing = p.ToBundle();
  missing.pop_back();
  EXPECT_EQ(CodeOf([&] { AggregationParams::FromBundle(missing); }), ErrorCode::kShapeMismatch);
}

}  // namespace
}  // namespace ldo
