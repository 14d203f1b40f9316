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

#include "texbias/tav.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "texbias/csv.hpp"
#include "texbias/error.hpp"

namespace texbias {

void CountMatrix::merge(const CountMatrix& other) {
  if (other.textures_ != textures_ || other.objects_ != objects_) {
    throw InvalidArgument("count matrix shape mismatch in merge");
  }
  for (std::size_t k = 0; k < counts_.size(); ++k) counts_[k] += other.counts_[k];
  total_ += other.total_;
}

CountMatrix CountMatrix::from_rows(const std::vector<std::vector<std::int64_t>>& rows) {
  const std::size_t n = rows.size();
  const std::size_t m = n == 0 ? 0 : rows.front().size();
  CountMatrix out(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != m) throw InvalidArgument("ragged count rows");
    for (std::size_t j = 0; j < m; ++j) {
      if (rows[i][j] < 0) throw InvalidArgument("negative count");
      out.add(i, j, rows[i][j]);
    }
  }
  return out;
}

const char* to_string(EntropyMode mode) {
  return mode == EntropyMode::kNormalized ? "normalized" : "raw";
}

EntropyMode entropy_mode_from_string(const std::string& text) {
  if (text == "normalized") return EntropyMode::kNormalized;
  if (text == "raw") return EntropyMode::kRawNatural;
  throw InvalidArgument("unknown entropy mode '" + text + "' (normalized|raw)");
}

void CountAccumulator::add(const TextureProbeRecord& record) {
  if (record.texture_class_id < 0 ||
      static_cast<std::size_t>(record.texture_class_id) >= counts_.textures() ||
      record.predicted_object_id < 0 ||
      static_cast<std::size_t>(record.predicted_object_id) >= counts_.objects()) {
    throw ValidationError("", 0,
                          fmt::format("record {} has ids outside the {}x{} registry",
                                      record.record_id, counts_.textures(),
                                      counts_.objects()));
  }
  counts_.add(static_cast<std::size_t>(record.texture_class_id),
              static_cast<std::size_t>(record.predicted_object_id));
}

CountMatrix count_matrix(std::span<const TextureProbeRecord> records,
                         std::size_t textures, std::size_t objects,
                         unsigned workers) {
  workers = std::max(1u, workers);
  const std::size_t shards =
      std::min<std::size_t>(workers, std::max<std::size_t>(1, records.size()));
  std::vector<CountAccumulator> partial(shards, CountAccumulator(textures, objects));
  std::vector<std::exception_ptr> failures(shards);
  {
    std::vector<std::jthread> pool;
    pool.reserve(shards);
    const std::size_t per = (records.size() + shards - 1) / shards;
    for (std::size_t s = 0; s < shards; ++s) {
      const std::size_t begin = std::min(records.size(), s * per);
      const std::size_t end = std::min(records.size(), begin + per);
      pool.emplace_back([&, s, begin, end] {
        try {
          for (std::size_t r = begin; r < end; ++r) partial[s].add(records[r]);
        } catch (...) {
          failures[s] = std::current_exception();
        }
      });
    }
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  CountAccumulator merged(textures, objects);
  for (const auto& p : partial) merged.merge(p);
  return merged.counts();
}

CountMatrix count_matrix(std::span<const TextureProbeRecord> records,
                         const ClassRegistry& registry, unsigned workers) {
  return count_matrix(records, registry.texture_count(), registry.object_count(),
                      workers);
}

double entropy(std::span<const double> distribution) {
  std::vector<double> terms;
  terms.reserve(distribution.size());
  for (double p : distribution) {
    if (p > 0.0) terms.push_back(-p * std::log(p));
  }
  std::sort(terms.begin(), terms.end());
  double h = 0.0;
  for (double t : terms) h += t;
  return h;
}

namespace {

double NormalizeEntropy(double h, std::size_t support, EntropyMode mode) {
  if (mode == EntropyMode::kRawNatural) return h;
  if (support < 2) return 0.0;
  return std::clamp(h / std::log(static_cast<double>(support)), 0.0, 1.0);
}

}  // namespace

TavComponents tav_components(const CountMatrix& counts, EntropyMode mode) {
  const std::size_t n = counts.textures();
  const std::size_t m = counts.objects();
  TavComponents c{RealMatrix(n, m), RealMatrix(n, m), std::vector<double>(n, 0.0),
                  std::vector<double>(m, 0.0)};

  std::vector<std::int64_t> row_sum(n, 0), col_sum(m, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      row_sum[i] += counts.at(i, j);
      col_sum[j] += counts.at(i, j);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const auto nij = static_cast<double>(counts.at(i, j));
      if (row_sum[i] > 0) c.pt.at(i, j) = nij / static_cast<double>(row_sum[i]);
      if (col_sum[j] > 0) c.po.at(i, j) = nij / static_cast<double>(col_sum[j]);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (row_sum[i] > 0) c.th[i] = NormalizeEntropy(entropy(c.pt.row(i)), m, mode);
  }
  std::vector<double> column(n);
  for (std::size_t j = 0; j < m; ++j) {
    if (col_sum[j] == 0) continue;
    for (std::size_t i = 0; i < n; ++i) column[i] = c.po.at(i, j);
    c.oh[j] = NormalizeEntropy(entropy(column), n, mode);
  }
  return c;
}

TavMatrix tav(const TavComponents& c) {
  const std::size_t n = c.pt.rows();
  const std::size_t m = c.pt.cols();
  TavMatrix out(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      out.at(i, j) = c.pt.at(i, j) * (1.0 - c.th[i]) * c.po.at(i, j) * (1.0 - c.oh[j]);
    }
  }
  return out;
}

TavMatrix tav(const CountMatrix& counts, EntropyMode mode) {
  return tav(tav_components(counts, mode));
}

std::vector<TexturePair> top_pairs(const TavMatrix& tav, std::size_t k) {
  const std::size_t cells = tav.rows() * tav.cols();
  if (k > cells) {
    throw InvalidArgument(fmt::format("top-k {} exceeds the {} cells of the TAV matrix",
                                      k, cells));
  }
  std::vector<TexturePair> all;
  all.reserve(cells);
  for (std::size_t i = 0; i < tav.rows(); ++i) {
    for (std::size_t j = 0; j < tav.cols(); ++j) all.push_back({i, j, tav.at(i, j)});
  }
  auto better = [](const TexturePair& a, const TexturePair& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.texture_id != b.texture_id) return a.texture_id < b.texture_id;
    return a.object_id < b.object_id;
  };
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(),
                    better);
  all.resize(k);
  return all;
}

ConfidenceHistogram::ConfidenceHistogram(std::size_t bins) : counts_(bins, 0) {
  if (bins == 0) throw InvalidArgument("histogram needs at least one bin");
}

double ConfidenceHistogram::edge(std::size_t b) const {
  return static_cast<double>(b) / static_cast<double>(counts_.size());
}

std::size_t ConfidenceHistogram::bin_of(double confidence) const {
  const std::size_t bins = counts_.size();
  const double scaled = std::floor(confidence * static_cast<double>(bins));
  std::size_t b = scaled <= 0.0 ? 0 : std::min(bins - 1, static_cast<std::size_t>(scaled));
  // confidence * bins can round across an edge; settle against the edges
  // actually reported.
  while (b + 1 < bins && confidence >= edge(b + 1)) ++b;
  while (b > 0 && confidence < edge(b)) --b;
  return b;
}

void ConfidenceHistogram::add(double confidence) {
  if (!(confidence >= 0.0 && confidence <= 1.0)) {
    throw InvalidArgument(fmt::format("confidence {} outside [0,1]", confidence));
  }
  ++counts_[bin_of(confidence)];
  ++total_;
}

ConfidenceHistogram confidence_histogram(std::span<const TextureProbeRecord> records,
                                         std::size_t bins) {
  ConfidenceHistogram h(bins);
  for (const auto& r : records) h.add(r.confidence);
  return h;
}

void write_tav_csv(std::ostream& out, const TavMatrix& tav,
                   const ClassRegistry& registry) {
  CsvWriter csv(out);
  std::vector<std::string> fields;
  fields.reserve(tav.cols() + 1);
  fields.push_back("texture");
  for (const auto& name : registry.object_names()) fields.push_back(name);
  csv.row(fields);
  for (std::size_t i = 0; i < tav.rows(); ++i) {
    fields.clear();
    fields.push_back(registry.texture_name(i));
    for (double v : tav.row(i)) fields.push_back(format_real(v));
    csv.row(fields);
  }
}

TavMatrix read_tav_csv(const std::string& path, const ClassRegistry& registry) {
  const CsvTable table = read_csv_file(path);
  const std::size_t n = registry.texture_count();
  const std::size_t m = registry.object_count();
  if (table.header.size() != m + 1 || table.header[0] != "texture") {
    throw ValidationError(path, 1, "TAV header does not match the registry objects");
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (table.header[j + 1] != registry.object_name(j)) {
      throw ValidationError(path, 1,
                            fmt::format("TAV column {} is '{}', registry has '{}'", j + 1,
                                        table.header[j + 1], registry.object_name(j)));
    }
  }
  if (table.rows.size() != n) {
    throw ValidationError(path, 0,
                          fmt::format("TAV has {} rows, registry has {} textures",
                                      table.rows.size(), n));
  }
  TavMatrix out(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = table.rows[i];
    const std::size_t line = table.row_lines[i];
    if (row[0] != registry.texture_name(i)) {
      throw ValidationError(path, line,
                            fmt::format("TAV row '{}' does not match texture '{}'", row[0],
                                        registry.texture_name(i)));
    }
    for (std::size_t j = 0; j < m; ++j) {
      // Raw-entropy matrices may hold negative values; accept any finite one.
      out.at(i, j) = parse_real_field(row[j + 1], path, line, "TAV value");
    }
  }
  return out;
}

void write_top_pairs_csv(std::ostream& out, std::span<const TexturePair> pairs,
                         const ClassRegistry& registry) {
  CsvWriter csv(out);
  csv.row({"rank", "object", "texture", "value"});
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    csv.row({std::to_string(r + 1), registry.object_name(pairs[r].object_id),
             registry.texture_name(pairs[r].texture_id), format_real(pairs[r].value)});
  }
}

void write_histogram_csv(std::ostream& out, const ConfidenceHistogram& histogram) {
  CsvWriter csv(out);
  csv.row({"bin", "lower", "upper", "count"});
  for (std::size_t b = 0; b < histogram.bins(); ++b) {
    csv.row({std::to_string(b), format_real(histogram.edge(b)),
             format_real(histogram.edge(b + 1)), std::to_string(histogram.counts()[b])});
  }
}

}  // namespace texbias
