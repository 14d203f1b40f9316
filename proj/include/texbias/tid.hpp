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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "texbias/records.hpp"
#include "texbias/registry.hpp"
#include "texbias/tav.hpp"

namespace texbias {

struct TextureMatch {
  std::int32_t texture_id = 0;
  double similarity = 0.0;  // cosine between probs and the winning TAV row
};

struct TidAssignment {
  std::string record_id;
  std::int32_t texture_id = 0;
  double similarity = 0.0;
  std::int32_t predicted_object_id = 0;  // argmax of probs, lowest id on ties
  double confidence = 0.0;               // max of probs
  std::optional<std::int32_t> true_label_id;

  friend bool operator==(const TidAssignment&, const TidAssignment&) = default;
};

// Cosine matcher over the rows of a TAV matrix. Row norms are computed once;
// all-zero rows never take part in the argmax.
class TidIndex {
 public:
  explicit TidIndex(const TavMatrix& tav);

  // Winning texture (lowest id on exact ties) and its cosine. Throws
  // InvalidArgument for a wrong-length or all-zero probs vector.
  TextureMatch match(std::span<const double> probs) const;

  std::size_t textures() const { return tav_->rows(); }
  std::size_t objects() const { return tav_->cols(); }

 private:
  const TavMatrix* tav_;
  std::vector<double> row_norms_;
  std::vector<std::size_t> active_rows_;
};

TextureMatch tid_assign(std::span<const double> probs, const TavMatrix& tav);
double tid_magnitude(std::span<const double> probs, const TavMatrix& tav);

// Assigns every record, preserving order, sharded over `workers` threads.
// Errors carry the offending record_id.
std::vector<TidAssignment> batch_assign(std::span<const ImageProbeRecord> records,
                                        const TidIndex& index, unsigned workers = 1);
std::vector<TidAssignment> batch_assign(std::span<const ImageProbeRecord> records,
                                        const TavMatrix& tav, unsigned workers = 1);

// assignments.csv: record_id,texture_id,texture_name,similarity,
// predicted_object_id,confidence,true_label_id (empty when unlabeled).
class AssignmentCsvWriter {
 public:
  AssignmentCsvWriter(std::ostream& out, const ClassRegistry& registry);
  void write(const TidAssignment& assignment);

 private:
  std::ostream& out_;
  const ClassRegistry& registry_;
};

void write_assignments_csv(std::ostream& out, std::span<const TidAssignment> assignments,
                           const ClassRegistry& registry);
std::vector<TidAssignment> read_assignments_csv(const std::string& path,
                                                const ClassRegistry& registry);

}  // namespace texbias
