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
#include <fstream>
#include <istream>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "texbias/registry.hpp"

namespace texbias {

// Tolerance on sum(probs) for image-probe records; absorbs float32 rounding
// from the exporting probe.
inline constexpr double kProbSumTolerance = 1e-4;

// Argmax prediction of one texture image.
struct TextureProbeRecord {
  std::string record_id;
  std::int32_t texture_class_id = 0;
  std::int32_t predicted_object_id = 0;
  double confidence = 0.0;

  friend bool operator==(const TextureProbeRecord&, const TextureProbeRecord&) = default;
};

// Full softmax output for one real image.
struct ImageProbeRecord {
  std::string record_id;
  std::string dataset_id;
  std::optional<std::int32_t> true_label_id;
  std::vector<double> probs;

  friend bool operator==(const ImageProbeRecord&, const ImageProbeRecord&) = default;
};

enum class DatasetKind { kTextureProbe, kImageProbe };

const char* to_string(DatasetKind kind);
DatasetKind dataset_kind_from_string(const std::string& text);

// JSON sidecar describing a record file. Written as "<records>.manifest.json".
// Keys beyond the core fields (e.g. a planted mapping) are preserved in
// `extra_json`, a serialized JSON object.
struct DatasetManifest {
  std::string dataset_id;
  std::int64_t record_count = 0;
  std::string registry_hash;
  DatasetKind kind = DatasetKind::kTextureProbe;
  std::optional<std::uint64_t> seed;
  std::string extra_json = "{}";

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

std::string manifest_path_for(const std::string& records_path);
DatasetManifest read_manifest(const std::string& path);
void write_manifest(const std::string& path, const DatasetManifest& manifest);

// Single-line JSON encodings (no trailing newline).
std::string to_jsonl(const TextureProbeRecord& record);
std::string to_jsonl(const ImageProbeRecord& record);

// Parse and validate one JSONL line. `source`/`line` only label errors.
TextureProbeRecord parse_texture_record(const std::string& text,
                                        const ClassRegistry& registry,
                                        const std::string& source,
                                        std::size_t line);
ImageProbeRecord parse_image_record(const std::string& text,
                                    const ClassRegistry& registry,
                                    const std::string& source,
                                    std::size_t line);

// Pull-based JSONL reader. Yields validated records in file order, skipping
// blank lines; the first invalid line throws ValidationError.
template <typename Record>
class JsonlReader {
 public:
  JsonlReader(const std::string& path, const ClassRegistry& registry);
  JsonlReader(std::istream& in, std::string source, const ClassRegistry& registry);

  std::optional<Record> next();

  // Line number of the most recently consumed line.
  std::size_t line() const { return line_; }
  const std::string& source() const { return source_; }

 private:
  std::unique_ptr<std::ifstream> owned_;
  std::istream* in_;
  std::string source_;
  const ClassRegistry* registry_;
  std::size_t line_ = 0;
  std::string buffer_;
};

using TextureRecordReader = JsonlReader<TextureProbeRecord>;
using ImageRecordReader = JsonlReader<ImageProbeRecord>;

extern template class JsonlReader<TextureProbeRecord>;
extern template class JsonlReader<ImageProbeRecord>;

std::vector<TextureProbeRecord> read_texture_records(const std::string& path,
                                                     const ClassRegistry& registry);
std::vector<ImageProbeRecord> read_image_records(const std::string& path,
                                                 const ClassRegistry& registry);

void write_texture_records(const std::string& path,
                           std::span<const TextureProbeRecord> records);
void write_image_records(const std::string& path,
                         std::span<const ImageProbeRecord> records);

}  // namespace texbias
