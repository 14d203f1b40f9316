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

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "texbias/error.hpp"

namespace texbias {
namespace {

struct SumCount {
  double sum = 0.0;
  std::int64_t count = 0;
};

std::int32_t ClassOf(const TidAssignment& a, GroupMode mode) {
  if (mode == GroupMode::kPrediction) return a.predicted_object_id;
  if (!a.true_label_id) {
    throw InvalidArgument(fmt::format("record {} has no true label", a.record_id));
  }
  return *a.true_label_id;
}

double MetricOf(const TidAssignment& a, GroupMode mode) {
  if (mode == GroupMode::kPrediction) return a.confidence;
  return a.predicted_object_id == *a.true_label_id ? 1.0 : 0.0;
}

std::optional<double> MeanOf(const SumCount& s) {
  if (s.count == 0) return std::nullopt;
  return s.sum / static_cast<double>(s.count);
}

}  // namespace

const char* to_string(GroupMode mode) {
  return mode == GroupMode::kLabel ? "label" : "prediction";
}

std::vector<AnalysisGroup> group_by(std::span<const TidAssignment> assignments,
                                    GroupMode mode) {
  std::map<std::pair<std::int32_t, std::int32_t>, SumCount> cells;
  std::map<std::int32_t, std::int64_t> class_totals;
  for (const auto& a : assignments) {
    const std::int32_t cls = ClassOf(a, mode);
    SumCount& cell = cells[{cls, a.texture_id}];
    cell.sum += MetricOf(a, mode);
    ++cell.count;
    ++class_totals[cls];
  }
  std::vector<AnalysisGroup> groups;
  groups.reserve(cells.size());
  for (const auto& [key, cell] : cells) {
    AnalysisGroup g;
    g.class_id = key.first;
    g.texture_id = key.second;
    g.sample_count = cell.count;
    g.count_ratio = static_cast<double>(cell.count) /
                    static_cast<double>(class_totals.at(key.first));
    g.mean_metric = cell.sum / static_cast<double>(cell.count);
    groups.push_back(g);
  }
  return groups;
}

std::vector<AnalysisGroup> group_by_label(std::span<const TidAssignment> assignments) {
  return group_by(assignments, GroupMode::kLabel);
}

std::vector<AnalysisGroup> group_by_prediction(std::span<const TidAssignment> assignments) {
  return group_by(assignments, GroupMode::kPrediction);
}

DominantTextureMap dominant_textures(std::span<const AnalysisGroup> groups) {
  DominantTextureMap out;
  for (const auto& g : groups) {
    auto [it, inserted] = out.try_emplace(g.class_id,
                                          DominantTexture{g.texture_id, g.sample_count, false});
    if (inserted) continue;
    DominantTexture& d = it->second;
    if (g.sample_count > d.sample_count) {
      d = {g.texture_id, g.sample_count, false};
    } else if (g.sample_count == d.sample_count) {
      d.tie = true;
      d.texture_id = std::min(d.texture_id, g.texture_id);
    }
  }
  return out;
}

DominanceSplit dominance_split(std::span<const TidAssignment> assignments,
                               const DominantTextureMap& dominant, GroupMode mode) {
  SumCount dom, non;
  for (const auto& a : assignments) {
    const std::int32_t cls = ClassOf(a, mode);
    auto it = dominant.find(cls);
    if (it == dominant.end()) {
      throw InvalidArgument(fmt::format("class {} of record {} has no dominant texture",
                                        cls, a.record_id));
    }
    SumCount& side = a.texture_id == it->second.texture_id ? dom : non;
    side.sum += MetricOf(a, mode);
    ++side.count;
  }
  DominanceSplit split;
  split.dominant_count = dom.count;
  split.nondominant_count = non.count;
  split.dominant_mean = MeanOf(dom);
  split.nondominant_mean = MeanOf(non);
  split.overall_mean = MeanOf({dom.sum + non.sum, dom.count + non.count});
  return split;
}

std::optional<double> ratio_metric_correlation(std::span<const AnalysisGroup> groups) {
  if (groups.size() < 2) {
    throw InvalidArgument("correlation needs at least two groups");
  }
  const auto constant = [&](auto field) {
    return std::all_of(groups.begin(), groups.end(),
                       [&](const AnalysisGroup& g) { return field(g) == field(groups[0]); });
  };
  const auto ratio = [](const AnalysisGroup& g) { return g.count_ratio; };
  const auto metric = [](const AnalysisGroup& g) { return g.mean_metric; };
  if (constant(ratio) || constant(metric)) return std::nullopt;

  const auto k = static_cast<double>(groups.size());
  double mx = 0.0, my = 0.0;
  for (const auto& g : groups) {
    mx += g.count_ratio;
    my += g.mean_metric;
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const auto& g : groups) {
    const double dx = g.count_ratio - mx;
    const double dy = g.mean_metric - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double avg_textures_per_class(std::span<const AnalysisGroup> groups) {
  if (groups.empty()) throw InvalidArgument("no groups to average over");
  std::map<std::int32_t, std::set<std::int32_t>> textures;
  for (const auto& g : groups) textures[g.class_id].insert(g.texture_id);
  double total = 0.0;
  for (const auto& [cls, set] : textures) total += static_cast<double>(set.size());
  return total / static_cast<double>(textures.size());
}

double AlignmentReport::ratio(Alignment which) const {
  const std::int64_t total = sample_count();
  if (total == 0) return 0.0;
  std::int64_t count = 0;
  switch (which) {
    case Alignment::kBoth: count = both; break;
    case Alignment::kPredictionOnly: count = prediction_only; break;
    case Alignment::kLabelOnly: count = label_only; break;
    case Alignment::kNeither: count = neither; break;
  }
  return static_cast<double>(count) / static_cast<double>(total);
}

std::optional<Alignment> classify_alignment(const TidAssignment& a,
                                            const DominantTextureMap& label_dominant,
                                            const DominantTextureMap& prediction_dominant) {
  if (!a.true_label_id) {
    throw InvalidArgument(fmt::format("record {} has no true label", a.record_id));
  }
  const auto pred_it = prediction_dominant.find(a.predicted_object_id);
  const auto label_it = label_dominant.find(*a.true_label_id);
  if (pred_it == prediction_dominant.end() || label_it == label_dominant.end()) {
    return std::nullopt;
  }
  const bool pred_agree = a.texture_id == pred_it->second.texture_id;
  const bool label_agree = a.texture_id == label_it->second.texture_id;
  if (pred_agree && label_agree) return Alignment::kBoth;
  if (pred_agree) return Alignment::kPredictionOnly;
  if (label_agree) return Alignment::kLabelOnly;
  return Alignment::kNeither;
}

AlignmentReport alignment_categories(std::span<const TidAssignment> adversarial,
                                     const DominantTextureMap& label_dominant,
                                     const DominantTextureMap& prediction_dominant) {
  AlignmentReport report;
  for (const auto& a : adversarial) {
    const auto category = classify_alignment(a, label_dominant, prediction_dominant);
    if (!category) {
      ++report.uncovered;
      continue;
    }
    switch (*category) {
      case Alignment::kBoth: ++report.both; break;
      case Alignment::kPredictionOnly: ++report.prediction_only; break;
      case Alignment::kLabelOnly: ++report.label_only; break;
      case Alignment::kNeither: ++report.neither; break;
    }
  }
  return report;
}

std::vector<LabelAgreement> per_label_agreement(std::span<const TidAssignment> adversarial,
                                                const DominantTextureMap& label_dominant,
                                                const DominantTextureMap& prediction_dominant) {
  std::map<std::int32_t, std::pair<std::int64_t, std::int64_t>> tallies;
  for (const auto& a : adversarial) {
    const auto category = classify_alignment(a, label_dominant, prediction_dominant);
    if (category == Alignment::kPredictionOnly) ++tallies[*a.true_label_id].first;
    if (category == Alignment::kLabelOnly) ++tallies[*a.true_label_id].second;
  }
  std::vector<LabelAgreement> out;
  out.reserve(tallies.size());
  for (const auto& [label, t] : tallies) {
    const std::int64_t total = t.first + t.second;
    out.push_back({label, static_cast<double>(t.first) / static_cast<double>(total),
                   static_cast<double>(t.second) / static_cast<double>(total), total});
  }
  return out;
}

double mean_similarity(std::span<const TidAssignment> assignments) {
  if (assignments.empty()) throw InvalidArgument("mean TID magnitude of an empty set");
  double sum = 0.0;
  for (const auto& a : assignments) sum += a.similarity;
  return sum / static_cast<double>(assignments.size());
}

std::pair<double, double> magnitude_comparison(std::span<const TidAssignment> set_a,
                                               std::span<const TidAssignment> set_b) {
  return {mean_similarity(set_a), mean_similarity(set_b)};
}

}  // namespace texbias
