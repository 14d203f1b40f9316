/* Copyright 2026 The texbias Authors. All Rights Reserved.

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

#include "texbias/analysis.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <vector>

#include "texbias/error.hpp"
#include "texbias/rng.hpp"

namespace texbias {
namespace {

// Frozen from tests/oracles/derive_expected.py (scipy.stats.pearsonr).
constexpr double kPearson = 0.9476966276867814;

TidAssignment Labeled(std::int32_t label, std::int32_t texture, std::int32_t predicted,
                      double confidence = 0.5, double similarity = 0.5) {
  static int next = 0;
  return {"r" + std::to_string(next++), texture, similarity, predicted, confidence, label};
}

AnalysisGroup Point(std::int32_t cls, double ratio, double metric) {
  return {cls, 0, 1, ratio, metric};
}

std::vector<TidAssignment> RandomAssignments(SeededRng& rng, std::size_t count,
                                             std::uint64_t classes, std::uint64_t textures) {
  std::vector<TidAssignment> out;
  for (std::size_t k = 0; k < count; ++k) {
    out.push_back(Labeled(static_cast<std::int32_t>(rng.below(classes)),
                          static_cast<std::int32_t>(rng.below(textures)),
                          static_cast<std::int32_t>(rng.below(classes)), rng.unit(),
                          rng.unit()));
  }
  return out;
}

TEST(GroupByLabelTest, DerivedTally) {
  std::vector<TidAssignment> a;
  for (int k = 0; k < 3; ++k) a.push_back(Labeled(0, 0, 0));
  a.push_back(Labeled(0, 1, 4));
  const auto g = group_by_label(a);
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g[0], (AnalysisGroup{0, 0, 3, 0.75, 1.0}));
  EXPECT_EQ(g[1], (AnalysisGroup{0, 1, 1, 0.25, 0.0}));
}

TEST(GroupByLabelTest, SingleGroupAndEmpty) {
  const std::vector<TidAssignment> a = {Labeled(2, 1, 2), Labeled(2, 1, 2)};
  const auto g = group_by_label(a);
  ASSERT_EQ(g.size(), 1u);
  EXPECT_EQ(g[0].count_ratio, 1.0);
  EXPECT_EQ(g[0].mean_metric, 1.0);
  EXPECT_TRUE(group_by_label({}).empty());
}

TEST(GroupByLabelTest, UnlabeledRejected) {
  std::vector<TidAssignment> a = {Labeled(0, 0, 0)};
  a[0].true_label_id.reset();
  EXPECT_THROW(group_by_label(a), InvalidArgument);
  EXPECT_NO_THROW(group_by_prediction(a));
}

TEST(GroupByPredictionTest, MeanConfidence) {
  const std::vector<TidAssignment> a = {Labeled(0, 1, 2, 0.9), Labeled(5, 1, 2, 0.7)};
  const auto g = group_by_prediction(a);
  ASSERT_EQ(g.size(), 1u);
  EXPECT_EQ(g[0].class_id, 2);
  EXPECT_EQ(g[0].texture_id, 1);
  EXPECT_EQ(g[0].count_ratio, 1.0);
  EXPECT_DOUBLE_EQ(g[0].mean_metric, 0.8);
}

TEST(GroupByPredictionTest, SingleAndEmpty) {
  const std::vector<TidAssignment> a = {Labeled(0, 3, 1, 0.42)};
  const auto g = group_by_prediction(a);
  ASSERT_EQ(g.size(), 1u);
  EXPECT_EQ(g[0].mean_metric, 0.42);
  EXPECT_TRUE(group_by_prediction({}).empty());
}

TEST(DominantTexturesTest, Examples) {
  const std::vector<AnalysisGroup> clear = {{0, 0, 5, 0.625, 1}, {0, 1, 3, 0.375, 1}};
  EXPECT_EQ(dominant_textures(clear).at(0), (DominantTexture{0, 5, false}));
  const std::vector<AnalysisGroup> tie = {{0, 1, 2, 0.5, 1}, {0, 0, 2, 0.5, 1}};
  EXPECT_EQ(dominant_textures(tie).at(0), (DominantTexture{0, 2, true}));
  const std::vector<AnalysisGroup> single = {{4, 7, 1, 1.0, 1}};
  EXPECT_EQ(dominant_textures(single).at(4).texture_id, 7);
}

TEST(DominantTexturesTest, LaterLargerCountClearsTie) {
  const std::vector<AnalysisGroup> g = {{0, 0, 2, 0.25, 1}, {0, 1, 2, 0.25, 1}, {0, 2, 4, 0.5, 1}};
  EXPECT_EQ(dominant_textures(g).at(0), (DominantTexture{2, 4, false}));
}

TEST(DominanceSplitTest, AllDominant) {
  const std::vector<TidAssignment> a = {Labeled(0, 1, 0), Labeled(0, 1, 3), Labeled(1, 2, 1)};
  const auto dom = dominant_textures(group_by_label(a));
  const auto s = dominance_split(a, dom, GroupMode::kLabel);
  EXPECT_EQ(s.nondominant_count, 0);
  EXPECT_FALSE(s.nondominant_mean.has_value());
  EXPECT_EQ(s.dominant_mean, s.overall_mean);
}

TEST(DominanceSplitTest, DerivedMeans) {
  std::vector<TidAssignment> a;
  for (int k = 0; k < 4; ++k) a.push_back(Labeled(0, 0, 0));  // dominant, correct
  a.push_back(Labeled(0, 1, 0));                              // nondominant, correct
  for (int k = 0; k < 3; ++k) a.push_back(Labeled(0, 1 + k, 9));
  const DominantTextureMap dom = {{0, {0, 4, false}}};
  const auto s = dominance_split(a, dom, GroupMode::kLabel);
  EXPECT_EQ(s.dominant_mean, 1.0);
  EXPECT_EQ(s.nondominant_mean, 0.25);
  EXPECT_EQ(s.overall_mean, 0.625);
  EXPECT_EQ(s.dominant_count, 4);
  EXPECT_EQ(s.nondominant_count, 4);
}

TEST(DominanceSplitTest, EmptyAndMissingClass) {
  const auto s = dominance_split({}, {}, GroupMode::kPrediction);
  EXPECT_EQ(s.dominant_count + s.nondominant_count, 0);
  EXPECT_FALSE(s.dominant_mean || s.nondominant_mean || s.overall_mean);
  const std::vector<TidAssignment> a = {Labeled(3, 0, 3)};
  EXPECT_THROW(dominance_split(a, {{0, {0, 1, false}}}, GroupMode::kLabel), InvalidArgument);
}

TEST(CorrelationTest, Examples) {
  const std::vector<AnalysisGroup> line = {Point(0, 0.1, 0.1), Point(1, 0.5, 0.5),
                                           Point(2, 0.9, 0.9)};
  EXPECT_NEAR(*ratio_metric_correlation(line), 1.0, 1e-12);
  const std::vector<AnalysisGroup> fixture = {Point(0, 0.2, 0.1), Point(1, 0.5, 0.6),
                                              Point(2, 0.9, 0.8)};
  EXPECT_NEAR(*ratio_metric_correlation(fixture), kPearson, 1e-12);
  EXPECT_NEAR(*ratio_metric_correlation(fixture), 0.9477, 1e-3);
  const std::vector<AnalysisGroup> flat = {Point(0, 0.2, 0.5), Point(1, 0.7, 0.5)};
  EXPECT_FALSE(ratio_metric_correlation(flat).has_value());
  EXPECT_THROW(ratio_metric_correlation(std::vector<AnalysisGroup>{Point(0, 1, 1)}),
               InvalidArgument);
}

TEST(CorrelationPropertyTest, AffineInvariance) {
  SeededRng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<AnalysisGroup> g, h;
    const double a = 0.1 + rng.unit() * 5, b = rng.unit() - 0.5;
    const double c = 0.1 + rng.unit() * 5, d = rng.unit() - 0.5;
    for (int k = 0; k < 3 + static_cast<int>(rng.below(20)); ++k) {
      const double x = rng.unit(), y = rng.unit();
      g.push_back(Point(k, x, y));
      h.push_back(Point(k, a * x + b, c * y + d));
    }
    const auto r = ratio_metric_correlation(g);
    ASSERT_TRUE(r.has_value());
    EXPECT_NEAR(*ratio_metric_correlation(h), *r, 1e-9);
    EXPECT_LE(std::abs(*r), 1.0);
    // Negating one variable flips the sign.
    for (auto& p : h) p.mean_metric = -p.mean_metric;
    EXPECT_NEAR(*ratio_metric_correlation(h), -*r, 1e-9);
  }
}

TEST(AvgTexturesTest, Examples) {
  const std::vector<AnalysisGroup> g = {{0, 0, 1, 0.5, 1}, {0, 1, 1, 0.5, 1},
                                        {1, 0, 1, 0.25, 1}, {1, 1, 1, 0.25, 1},
                                        {1, 2, 1, 0.25, 1}, {1, 3, 1, 0.25, 1}};
  EXPECT_EQ(avg_textures_per_class(g), 3.0);
  const std::vector<AnalysisGroup> singles = {{0, 4, 1, 1, 1}, {1, 2, 1, 1, 1}};
  EXPECT_EQ(avg_textures_per_class(singles), 1.0);
  const std::vector<AnalysisGroup> one = {{0, 0, 1, 0.5, 1}, {0, 1, 1, 0.5, 1}};
  EXPECT_EQ(avg_textures_per_class(one), 2.0);
  EXPECT_THROW(avg_textures_per_class({}), InvalidArgument);
}

TEST(AlignmentTest, BothAndNeither) {
  const DominantTextureMap label_dom = {{0, {3, 1, false}}};
  const DominantTextureMap pred_dom = {{1, {3, 1, false}}};
  EXPECT_EQ(classify_alignment(Labeled(0, 3, 1), label_dom, pred_dom), Alignment::kBoth);
  EXPECT_EQ(classify_alignment(Labeled(0, 4, 1), label_dom, pred_dom), Alignment::kNeither);
  EXPECT_EQ(classify_alignment(Labeled(0, 3, 2), label_dom, pred_dom), std::nullopt);
}

TEST(AlignmentTest, ConstructedTenSamples) {
  // Label 0 dominant texture 0, prediction 1 dominant texture 1.
  const DominantTextureMap label_dom = {{0, {0, 1, false}}};
  const DominantTextureMap pred_dom = {{1, {1, 1, false}}, {2, {0, 1, false}}};
  std::vector<TidAssignment> a;
  a.push_back(Labeled(0, 0, 2));                            // both
  for (int k = 0; k < 6; ++k) a.push_back(Labeled(0, 1, 1));  // prediction only
  a.push_back(Labeled(0, 0, 1));                            // label only
  for (int k = 0; k < 2; ++k) a.push_back(Labeled(0, 5, 1));  // neither
  a.push_back(Labeled(0, 0, 7));                            // uncovered
  const auto r = alignment_categories(a, label_dom, pred_dom);
  EXPECT_EQ(r.sample_count(), 10);
  EXPECT_EQ(r.uncovered, 1);
  EXPECT_EQ(r.both_ratio(), 0.1);
  EXPECT_EQ(r.prediction_only_ratio(), 0.6);
  EXPECT_EQ(r.label_only_ratio(), 0.1);
  EXPECT_EQ(r.neither_ratio(), 0.2);
}

TEST(AlignmentPropertyTest, RatiosPartitionUnity) {
  SeededRng rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const auto val = RandomAssignments(rng, 50 + rng.below(200), 2 + rng.below(10),
                                       2 + rng.below(10));
    const auto adv = RandomAssignments(rng, 1 + rng.below(300), 2 + rng.below(12),
                                       2 + rng.below(10));
    const auto label_dom = dominant_textures(group_by_label(val));
    const auto pred_dom = dominant_textures(group_by_prediction(val));
    const auto r = alignment_categories(adv, label_dom, pred_dom);
    EXPECT_EQ(r.sample_count() + r.uncovered, static_cast<std::int64_t>(adv.size()));
    if (r.sample_count() == 0) continue;
    const double sum = r.both_ratio() + r.prediction_only_ratio() + r.label_only_ratio() +
                       r.neither_ratio();
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
}

TEST(PerLabelAgreementTest, Examples) {
  const DominantTextureMap label_dom = {{0, {0, 1, false}}, {1, {0, 1, false}},
                                        {2, {0, 1, false}}};
  const DominantTextureMap pred_dom = {{5, {1, 1, false}}};
  std::vector<TidAssignment> a;
  for (int k = 0; k < 2; ++k) a.push_back(Labeled(0, 1, 5));  // label 0: prediction only
  for (int k = 0; k < 3; ++k) a.push_back(Labeled(1, 1, 5));  // label 1: 3 prediction only
  a.push_back(Labeled(1, 0, 5));                            // label 1: 1 label only
  a.push_back(Labeled(2, 3, 5));                            // label 2: neither
  const auto out = per_label_agreement(a, label_dom, pred_dom);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].label_id, 0);
  EXPECT_EQ(out[0].prediction_agree_rate, 1.0);
  EXPECT_EQ(out[0].label_agree_rate, 0.0);
  EXPECT_EQ(out[1].label_id, 1);
  EXPECT_EQ(out[1].prediction_agree_rate, 0.75);
  EXPECT_EQ(out[1].label_agree_rate, 0.25);
  EXPECT_EQ(out[1].sample_count, 4);
}

TEST(MagnitudeTest, Examples) {
  const std::vector<TidAssignment> a = {Labeled(0, 0, 0, 0.5, 0.2), Labeled(0, 0, 0, 0.5, 0.4)};
  const std::vector<TidAssignment> b = {Labeled(0, 0, 0, 0.5, 0.8)};
  const auto [ma, mb] = magnitude_comparison(a, b);
  EXPECT_DOUBLE_EQ(ma, 0.3);
  EXPECT_EQ(mb, 0.8);
  const auto [x, y] = magnitude_comparison(a, a);
  EXPECT_EQ(x, y);
  EXPECT_THROW(magnitude_comparison(a, {}), InvalidArgument);
}

// Naive one-pass tally used as the oracle for the grouped aggregations.
TEST(AnalysisPropertyTest, GroupsMatchOnePassOracle) {
  SeededRng rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = RandomAssignments(rng, rng.below(400), 2 + rng.below(6), 2 + rng.below(6));
    for (const GroupMode mode : {GroupMode::kLabel, GroupMode::kPrediction}) {
      std::map<std::pair<int, int>, std::pair<double, int>> cell;
      std::map<int, int> total;
      for (const auto& x : a) {
        const int cls = mode == GroupMode::kLabel ? *x.true_label_id : x.predicted_object_id;
        const double metric = mode == GroupMode::kLabel
                                  ? (x.predicted_object_id == *x.true_label_id ? 1.0 : 0.0)
                                  : x.confidence;
        cell[{cls, x.texture_id}].first += metric;
        cell[{cls, x.texture_id}].second += 1;
        total[cls] += 1;
      }
      const auto groups = group_by(a, mode);
      ASSERT_EQ(groups.size(), cell.size());
      std::map<int, double> ratio_sum;
      for (const auto& g : groups) {
        const auto& [sum, count] = cell.at({g.class_id, g.texture_id});
        EXPECT_EQ(g.sample_count, count);
        EXPECT_NEAR(g.mean_metric, sum / count, 1e-12);
        EXPECT_EQ(g.count_ratio, static_cast<double>(count) / total.at(g.class_id));
        ratio_sum[g.class_id] += g.count_ratio;
      }
      for (const auto& [cls, s] : ratio_sum) EXPECT_NEAR(s, 1.0, 1e-12);

      // Dominant group sits on the upper envelope of its class.
      const auto dom = dominant_textures(groups);
      for (const auto& g : groups) EXPECT_LE(g.sample_count, dom.at(g.class_id).sample_count);

      // Weighted-mean identity between the two sides and the overall mean.
      const auto s = dominance_split(a, dom, mode);
      if (s.dominant_count + s.nondominant_count == 0) continue;
      const double weighted =
          (s.dominant_count * s.dominant_mean.value_or(0.0) +
           s.nondominant_count * s.nondominant_mean.value_or(0.0)) /
          static_cast<double>(s.dominant_count + s.nondominant_count);
      EXPECT_NEAR(weighted, *s.overall_mean, 1e-12);
    }
  }
}

}  // namespace
}  // namespace texbias
