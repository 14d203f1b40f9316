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

#include "texbias/tid.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "texbias/csv.hpp"
#include "texbias/error.hpp"

namespace texbias {
namespace {

double Norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

TidAssignment AssignOne(const ImageProbeRecord& record, const TidIndex& index) {
  TidAssignment a;
  a.record_id = record.record_id;
  a.true_label_id = record.true_label_id;
  try {
    const TextureMatch m = index.match(record.probs);
    a.texture_id = m.texture_id;
    a.similarity = m.similarity;
  } catch (const Error& e) {
    throw Error(e.code(), fmt::format("record {}: {}", record.record_id, e.what()));
  }
  const auto best = std::max_element(record.probs.begin(), record.probs.end());
  a.predicted_object_id = static_cast<std::int32_t>(best - record.probs.begin());
  a.confidence = *best;
  return a;
}

}  // namespace

TidIndex::TidIndex(const TavMatrix& tav) : tav_(&tav), row_norms_(tav.rows(), 0.0) {
  for (std::size_t i = 0; i < tav.rows(); ++i) {
    row_norms_[i] = Norm(tav.row(i));
    if (row_norms_[i] > 0.0) active_rows_.push_back(i);
  }
  if (active_rows_.empty()) {
    throw InvalidArgument("every TAV row is zero; no texture can be identified");
  }
}

TextureMatch TidIndex::match(std::span<const double> probs) const {
  if (probs.size() != tav_->cols()) {
    throw InvalidArgument(fmt::format("probs length {} does not match {} TAV columns",
                                      probs.size(), tav_->cols()));
  }
  const double probs_norm = Norm(probs);
  if (!(probs_norm > 0.0)) throw InvalidArgument("probs vector is all zero");

  TextureMatch best{static_cast<std::int32_t>(active_rows_.front()), -2.0};
  for (std::size_t i : active_rows_) {
    const double cosine = Dot(probs, tav_->row(i)) / (probs_norm * row_norms_[i]);
    if (cosine > best.similarity) best = {static_cast<std::int32_t>(i), cosine};
  }
  // Rounding can push a parallel pair a hair past 1.
  best.similarity = std::min(best.similarity, 1.0);
  return best;
}

TextureMatch tid_assign(std::span<const double> probs, const TavMatrix& tav) {
  return TidIndex(tav).match(probs);
}

double tid_magnitude(std::span<const double> probs, const TavMatrix& tav) {
  return tid_assign(probs, tav).similarity;
}

std::vector<TidAssignment> batch_assign(std::span<const ImageProbeRecord> records,
                                        const TidIndex& index, unsigned workers) {
  std::vector<TidAssignment> out(records.size());
  if (records.empty()) return out;
  const std::size_t shards = std::min<std::size_t>(std::max(1u, workers), records.size());
  const std::size_t per = (records.size() + shards - 1) / shards;
  std::vector<std::exception_ptr> failures(shards);
  {
    std::vector<std::jthread> pool;
    pool.reserve(shards);
    for (std::size_t s = 0; s < shards; ++s) {
      const std::size_t begin = std::min(records.size(), s * per);
      const std::size_t end = std::min(records.size(), begin + per);
      pool.emplace_back([&, s, begin, end] {
        try {
          for (std::size_t r = begin; r < end; ++r) out[r] = AssignOne(records[r], index);
        } catch (...) {
          failures[s] = std::current_exception();
        }
      });
    }
  }
  // Report the earliest failing shard so the error is independent of timing.
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return out;
}

std::vector<TidAssignment> batch_assign(std::span<const ImageProbeRecord> records,
                                        const TavMatrix& tav, unsigned workers) {
  return batch_assign(records, TidIndex(tav), workers);
}

AssignmentCsvWriter::AssignmentCsvWriter(std::ostream& out, const ClassRegistry& registry)
    : out_(out), registry_(registry) {
  CsvWriter(out_).row({"record_id", "texture_id", "texture_name", "similarity",
                       "predicted_object_id", "confidence", "true_label_id"});
}

void AssignmentCsvWriter::write(const TidAssignment& a) {
  CsvWriter(out_).row(
      {a.record_id, std::to_string(a.texture_id),
       registry_.texture_name(static_cast<std::size_t>(a.texture_id)),
       format_real(a.similarity), std::to_string(a.predicted_object_id),
       format_real(a.confidence),
       a.true_label_id ? std::to_string(*a.true_label_id) : std::string()});
}

void write_assignments_csv(std::ostream& out, std::span<const TidAssignment> assignments,
                           const ClassRegistry& registry) {
  AssignmentCsvWriter writer(out, registry);
  for (const auto& a : assignments) writer.write(a);
}

std::vector<TidAssignment> read_assignments_csv(const std::string& path,
                                                const ClassRegistry& registry) {
  const CsvTable table = read_csv_file(path);
  const std::size_t c_id = table.column("record_id", path);
  const std::size_t c_tex = table.column("texture_id", path);
  const std::size_t c_sim = table.column("similarity", path);
  const std::size_t c_pred = table.column("predicted_object_id", path);
  const std::size_t c_conf = table.column("confidence", path);
  const std::size_t c_label = table.column("true_label_id", path);
  const auto n = static_cast<long long>(registry.texture_count());
  const auto m = static_cast<long long>(registry.object_count());

  std::vector<TidAssignment> out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = table.row_lines[r];
    TidAssignment a;
    a.record_id = row[c_id];
    const long long tex = parse_int_field(row[c_tex], path, line, "texture_id");
    if (tex < 0 || tex >= n) throw ValidationError(path, line, "texture id out of range");
    a.texture_id = static_cast<std::int32_t>(tex);
    a.similarity = parse_real_field(row[c_sim], path, line, "similarity");
    const long long pred = parse_int_field(row[c_pred], path, line, "predicted_object_id");
    if (pred < 0 || pred >= m) throw ValidationError(path, line, "object id out of range");
    a.predicted_object_id = static_cast<std::int32_t>(pred);
    a.confidence = parse_real_field(row[c_conf], path, line, "confidence");
    if (a.confidence < 0.0 || a.confidence > 1.0) {
      throw ValidationError(path, line, "confidence outside [0,1]");
    }
    if (!row[c_label].empty()) {
      const long long label = parse_int_field(row[c_label], path, line, "true_label_id");
      if (label < 0 || label >= m) throw ValidationError(path, line, "label id out of range");
      a.true_label_id = static_cast<std::int32_t>(label);
    }
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace texbias
