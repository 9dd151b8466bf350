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
#include "ldo/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "ldo/error.hpp"
#include "support/metric_fixtures.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

namespace ldo {
namespace {

using testing::Rng;

void ExpectClass(const ClassIou& got, const testing::ClassTally& want, const std::string& name) {
  EXPECT_EQ(got.true_positive, want.tp) << name;
  EXPECT_EQ(got.false_positive, want.fp) << name;
  EXPECT_EQ(got.false_negative, want.fn) << name;
  ASSERT_EQ(got.iou.has_value(), want.iou.has_value()) << name;
  if (want.iou) {
    EXPECT_DOUBLE_EQ(*got.iou, *want.iou) << name;
  }
}

TEST(EvaluateTest, HandCountedFixtures) {
  ASSERT_GE(testing::MetricFixtures().size(), 10u);
  for (const testing::MetricFixture& f : testing::MetricFixtures()) {
    const OccEvalReport r = Evaluate(f.pred, f.gt, testing::kFixtureClasses);
    EXPECT_EQ(r.occupied_intersection, f.intersection) << f.name;
    EXPECT_EQ(r.occupied_union, f.union_) << f.name;
    EXPECT_DOUBLE_EQ(r.sc_iou, f.sc_iou) << f.name;
    ASSERT_EQ(r.per_class.size(), 2u);
    EXPECT_EQ(r.per_class[0].label, 1);
    ExpectClass(r.per_class[0], f.class1, f.name);
    ExpectClass(r.per_class[1], f.class2, f.name);
    EXPECT_DOUBLE_EQ(r.ssc_miou, f.ssc_miou) << f.name;
    EXPECT_EQ(r.defined_classes, f.defined) << f.name;
  }
}

TEST(EvaluateTest, IdentityAndDisjoint) {
  const std::vector<std::uint16_t> gt = {0, 3, 3, 1, 0, 2};
  const OccEvalReport same = Evaluate(gt, gt, 4);
  EXPECT_EQ(same.sc_iou, 1.0);
  EXPECT_EQ(same.ssc_miou, 1.0);
  const std::vector<std::uint16_t> empty(gt.size(), 0);
  EXPECT_EQ(Evaluate(empty, gt, 4).sc_iou, 0.0);
}

TEST(EvaluateTest, Errors) {
  const std::vector<std::uint16_t> a = {0, 1, 2}, b = {0, 1};
  EXPECT_THROW(Evaluate(a, b, 3), Error);
  try {
    Evaluate(a, b, 3);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimMismatch);
  }
  const std::vector<std::uint16_t> c = {0, 1, 3};
  try {
    Evaluate(a, c, 3);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLabelOutOfRange);
  }
  LdoGrid g1(GridSpec(Vec3(0, 0, 0), Vec3(2, 3, 1), Vec3(1, 1, 1)));
  LdoGrid g2(GridSpec(Vec3(0, 0, 0), Vec3(3, 2, 1), Vec3(1, 1, 1)));
  try {
    Evaluate(g1, g2, 3);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimMismatch);
  }
}

std::vector<std::uint16_t> RandomLabels(Rng& rng, std::size_t n, std::uint16_t m, double empty) {
  std::bernoulli_distribution is_empty(empty);
  std::vector<std::uint16_t> out(n);
  for (auto& l : out) l = is_empty(rng) ? 0 : static_cast<std::uint16_t>(1 + rng() % (m - 1));
  return out;
}

TEST(EvaluateTest, MatchesBruteForceLoops) {
  Rng rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    const std::uint16_t m = static_cast<std::uint16_t>(2 + trial % 7);
    const auto pred = RandomLabels(rng, 500, m, 0.4);
    const auto gt = RandomLabels(rng, 500, m, 0.6);
    const OccEvalReport r = Evaluate(pred, gt, m);
    const testing::Confusion c = testing::OracleConfusion(pred, gt, m);
    EXPECT_EQ(r.occupied_intersection, c.intersection);
    EXPECT_EQ(r.occupied_union, c.union_);
    for (const ClassIou& k : r.per_class) {
      EXPECT_EQ(k.true_positive, c.per_class.at(k.label)[0]);
      EXPECT_EQ(k.false_positive, c.per_class.at(k.label)[1]);
      EXPECT_EQ(k.false_negative, c.per_class.at(k.label)[2]);
    }
  }
}

TEST(EvaluateTest, ScIouSymmetric) {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = RandomLabels(rng, 300, 5, 0.5);
    const auto b = RandomLabels(rng, 300, 5, 0.3);
    EXPECT_EQ(Evaluate(a, b, 5).sc_iou, Evaluate(b, a, 5).sc_iou);
  }
}

TEST(EvaluateTest, ClassRelabelingKeepsMiou) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::uint16_t m = 6;
    const auto a = RandomLabels(rng, 200, m, 0.3);
    const auto b = RandomLabels(rng, 200, m, 0.3);
    std::vector<std::uint16_t> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin() + 1, perm.end(), rng);  // EMPTY stays EMPTY
    std::vector<std::uint16_t> pa(a.size()), pb(b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      pa[i] = perm[a[i]];
      pb[i] = perm[b[i]];
    }
    EXPECT_NEAR(Evaluate(a, b, m).ssc_miou, Evaluate(pa, pb, m).ssc_miou, 1e-15);
  }
}

TEST(FormatReportTest, Lines) {
  const testing::MetricFixture& f = testing::MetricFixtures()[3];  // half_overlap
  const std::string text = FormatReport(Evaluate(f.pred, f.gt, 3));
  EXPECT_EQ(text,
            "sc_iou 0.333333 (2 / 6)\n"
            "ssc_miou 0.333333 over 1 classes\n"
            "class 1 iou 0.333333 tp 2 fp 2 fn 2\n"
            "class 2 iou undefined\n");
}

}  // namespace
}  // namespace ldo
