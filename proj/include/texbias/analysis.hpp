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

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "texbias/tid.hpp"

namespace texbias {

// kLabel groups by true label and measures accuracy; kPrediction groups by the
// predicted object and measures confidence.
enum class GroupMode { kLabel, kPrediction };

const char* to_string(GroupMode mode);

// One (class, texture) bucket.
struct AnalysisGroup {
  std::int32_t class_id = 0;
  std::int32_t texture_id = 0;
  std::int64_t sample_count = 0;
  double count_ratio = 0.0;  // sample_count / samples in the class
  double mean_metric = 0.0;  // accuracy (label mode) or confidence (prediction mode)

  friend bool operator==(const AnalysisGroup&, const AnalysisGroup&) = default;
};

// Groups are returned sorted by (class_id, texture_id).
std::vector<AnalysisGroup> group_by_label(std::span<const TidAssignment> assignments);
std::vector<AnalysisGroup> group_by_prediction(std::span<const TidAssignment> assignments);
std::vector<AnalysisGroup> group_by(std::span<const TidAssignment> assignments,
                                    GroupMode mode);

struct DominantTexture {
  std::int32_t texture_id = 0;
  std::int64_t sample_count = 0;
  bool tie = false;  // another texture in the class has the same count

  friend bool operator==(const DominantTexture&, const DominantTexture&) = default;
};

using DominantTextureMap = std::map<std::int32_t, DominantTexture>;

DominantTextureMap dominant_textures(std::span<const AnalysisGroup> groups);

struct DominanceSplit {
  std::optional<double> dominant_mean;
  std::optional<double> nondominant_mean;
  std::optional<double> overall_mean;
  std::int64_t dominant_count = 0;
  std::int64_t nondominant_count = 0;
};

// Throws InvalidArgument if a sample's class has no entry in `dominant`.
DominanceSplit dominance_split(std::span<const TidAssignment> assignments,
                               const DominantTextureMap& dominant, GroupMode mode);

// Pearson r between count_ratio and mean_metric over all groups; nullopt when
// either has zero variance. Needs at least two groups.
std::optional<double> ratio_metric_correlation(std::span<const AnalysisGroup> groups);

// Mean over classes of the number of distinct textures present.
double avg_textures_per_class(std::span<const AnalysisGroup> groups);

enum class Alignment { kBoth, kPredictionOnly, kLabelOnly, kNeither };

struct AlignmentReport {
  std::int64_t both = 0;
  std::int64_t prediction_only = 0;
  std::int64_t label_only = 0;
  std::int64_t neither = 0;
  // Samples whose predicted or label class is missing from a dominant map;
  // excluded from the ratios.
  std::int64_t uncovered = 0;

  std::int64_t sample_count() const { return both + prediction_only + label_only + neither; }
  double ratio(Alignment which) const;
  double both_ratio() const { return ratio(Alignment::kBoth); }
  double prediction_only_ratio() const { return ratio(Alignment::kPredictionOnly); }
  double label_only_ratio() const { return ratio(Alignment::kLabelOnly); }
  double neither_ratio() const { return ratio(Alignment::kNeither); }
};

// nullopt when either class is absent from its map. The assignment must be
// labeled.
std::optional<Alignment> classify_alignment(const TidAssignment& assignment,
                                            const DominantTextureMap& label_dominant,
                                            const DominantTextureMap& prediction_dominant);

AlignmentReport alignment_categories(std::span<const TidAssignment> adversarial,
                                     const DominantTextureMap& label_dominant,
                                     const DominantTextureMap& prediction_dominant);

struct LabelAgreement {
  std::int32_t label_id = 0;
  double prediction_agree_rate = 0.0;
  double label_agree_rate = 0.0;
  std::int64_t sample_count = 0;  // prediction-only + label-only samples
};

// Per label, over its prediction-only and label-only samples only. Labels
// without such samples are omitted. Sorted by label id.
std::vector<LabelAgreement> per_label_agreement(std::span<const TidAssignment> adversarial,
                                                const DominantTextureMap& label_dominant,
                                                const DominantTextureMap& prediction_dominant);

double mean_similarity(std::span<const TidAssignment> assignments);
std::pair<double, double> magnitude_comparison(std::span<const TidAssignment> set_a,
                                               std::span<const TidAssignment> set_b);

}  // namespace texbias
