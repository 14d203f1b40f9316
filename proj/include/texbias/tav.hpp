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
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "texbias/records.hpp"
#include "texbias/registry.hpp"

namespace texbias {

// N[i][j]: how many texture-i probe images were predicted as object j.
class CountMatrix {
 public:
  CountMatrix() = default;
  CountMatrix(std::size_t textures, std::size_t objects)
      : textures_(textures), objects_(objects), counts_(textures * objects, 0) {}

  std::size_t textures() const { return textures_; }
  std::size_t objects() const { return objects_; }
  std::int64_t total() const { return total_; }

  std::int64_t at(std::size_t i, std::size_t j) const { return counts_[i * objects_ + j]; }
  std::span<const std::int64_t> values() const { return counts_; }

  void add(std::size_t i, std::size_t j, std::int64_t count = 1) {
    counts_[i * objects_ + j] += count;
    total_ += count;
  }

  // Exact integer merge; shapes must match.
  void merge(const CountMatrix& other);

  static CountMatrix from_rows(const std::vector<std::vector<std::int64_t>>& rows);

  friend bool operator==(const CountMatrix&, const CountMatrix&) = default;

 private:
  std::size_t textures_ = 0;
  std::size_t objects_ = 0;
  std::vector<std::int64_t> counts_;
  std::int64_t total_ = 0;
};

// Dense row-major texture x object matrix of reals.
class RealMatrix {
 public:
  RealMatrix() = default;
  RealMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& at(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }
  double at(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) { return {values_.data() + i * cols_, cols_}; }
  std::span<const double> values() const { return values_; }

  friend bool operator==(const RealMatrix&, const RealMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

using TavMatrix = RealMatrix;

enum class EntropyMode {
  // Entropy divided by log(support size): m for texture rows, n for object
  // columns. Keeps every factor of the TAV product in [0, 1].
  kNormalized,
  // Plain natural-log entropy; 1 - H may go negative.
  kRawNatural,
};

const char* to_string(EntropyMode mode);
EntropyMode entropy_mode_from_string(const std::string& text);

struct TavComponents {
  RealMatrix pt;                 // N_ij / row_sum_i
  RealMatrix po;                 // N_ij / col_sum_j
  std::vector<double> th;        // per-texture entropy of pt row
  std::vector<double> oh;        // per-object entropy of po column
};

// Incremental tally; shards can be accumulated independently and merged.
class CountAccumulator {
 public:
  CountAccumulator(std::size_t textures, std::size_t objects)
      : counts_(textures, objects) {}

  void add(const TextureProbeRecord& record);
  void merge(const CountAccumulator& other) { counts_.merge(other.counts_); }
  const CountMatrix& counts() const { return counts_; }

 private:
  CountMatrix counts_;
};

// Parallel reduction over `workers` contiguous shards. The result does not
// depend on `workers`.
CountMatrix count_matrix(std::span<const TextureProbeRecord> records,
                         std::size_t textures, std::size_t objects,
                         unsigned workers = 1);
CountMatrix count_matrix(std::span<const TextureProbeRecord> records,
                         const ClassRegistry& registry, unsigned workers = 1);

// Shannon entropy of a distribution, 0 log 0 = 0. The p log p terms are
// summed in sorted order so the result is independent of element order.
double entropy(std::span<const double> distribution);

TavComponents tav_components(const CountMatrix& counts,
                             EntropyMode mode = EntropyMode::kNormalized);
TavMatrix tav(const CountMatrix& counts, EntropyMode mode = EntropyMode::kNormalized);
TavMatrix tav(const TavComponents& components);

struct TexturePair {
  std::size_t texture_id = 0;
  std::size_t object_id = 0;
  double value = 0.0;
};

// Highest-valued (texture, object) cells; ties by (texture id, object id).
std::vector<TexturePair> top_pairs(const TavMatrix& tav, std::size_t k);

class ConfidenceHistogram {
 public:
  explicit ConfidenceHistogram(std::size_t bins);

  // Bins are [e_b, e_{b+1}) with e_b = b / bins; the last bin is closed so
  // that confidence 1.0 is counted.
  void add(double confidence);

  std::size_t bins() const { return counts_.size(); }
  double edge(std::size_t b) const;
  std::span<const std::int64_t> counts() const { return counts_; }
  std::int64_t total() const { return total_; }
  std::size_t bin_of(double confidence) const;

 private:
  std::vector<std::int64_t> counts_;
  std::int64_t total_ = 0;
};

ConfidenceHistogram confidence_histogram(std::span<const TextureProbeRecord> records,
                                         std::size_t bins);

// tav.csv: header "texture,<object names...>", one row per texture,
// values with 17 significant digits.
void write_tav_csv(std::ostream& out, const TavMatrix& tav, const ClassRegistry& registry);
TavMatrix read_tav_csv(const std::string& path, const ClassRegistry& registry);

// top_pairs.csv: rank,object,texture,value (rank is 1-based).
void write_top_pairs_csv(std::ostream& out, std::span<const TexturePair> pairs,
                         const ClassRegistry& registry);

// confidence_hist.csv: bin,lower,upper,count.
void write_histogram_csv(std::ostream& out, const ConfidenceHistogram& histogram);

}  // namespace texbias
