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
#include <functional>
#include <string>
#include <string_view>

#include "texbias/tav.hpp"

namespace texbias {

// Everything a pipeline stage needs. Empty paths mean "not provided".
struct RunConfig {
  std::string registry;
  std::string texture_records;
  std::string val_records;
  std::string adv_records;
  std::string tav;              // precomputed tav.csv, used instead of texture_records
  std::string val_assignments;  // precomputed assignments.csv for the validation set
  std::string adv_assignments;
  std::string out;

  EntropyMode entropy = EntropyMode::kNormalized;
  std::size_t bins = 10;
  std::size_t top_k = 50;
  std::uint64_t seed = 0;
  unsigned workers = 1;

  // humaneval
  std::string assignments;
  std::string image_refs;
  std::string package;
  std::string responses;
  std::string package_id;
  std::size_t count = 200;

  // synth
  std::size_t textures = 8;
  std::size_t objects = 8;
  std::size_t samples_per_texture = 100;
  std::size_t images_per_object = 25;
  double noise = 0.05;
  double adv_noise = 0.3;

  // Receives notices and diagnostics, one line per call.
  std::function<void(std::string_view)> log;
};

// Streams every provided input through validation. Returns the exit status:
// 0 clean, 1 validation failure, 2 missing input. Never throws for bad input.
int run_validate(const RunConfig& config);

// Writes tav.csv, top_pairs.csv and confidence_hist.csv to config.out.
void run_tav(const RunConfig& config);

// Writes assignments.csv, groups.csv, dominant_textures.csv, dominance.csv,
// correlations.csv and summary.json; with adversarial input also
// adv_assignments.csv, alignment.csv, per_label_agreement.csv and
// magnitude.csv.
void run_analyze(const RunConfig& config);

// Writes package.json.
void run_humaneval_pack(const RunConfig& config);

// Writes agreement.csv.
void run_humaneval_score(const RunConfig& config);

// Writes a planted fixture: registry.json, texture_records.jsonl,
// val_records.jsonl, adv_records.jsonl and their manifests.
void run_synth(const RunConfig& config);

}  // namespace texbias
