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

#include "texbias/records.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "json.hpp"
#include "texbias/error.hpp"

namespace texbias {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

bool IsBlank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

json ParseObject(const std::string& text, const std::string& source,
                 std::size_t line) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error&) {
    throw ValidationError(source, line, "malformed JSON line");
  }
  if (!doc.is_object()) {
    throw ValidationError(source, line, "record must be a JSON object");
  }
  return doc;
}

const json& Field(const json& doc, const char* key, const std::string& source,
                  std::size_t line) {
  auto it = doc.find(key);
  if (it == doc.end()) {
    throw ValidationError(source, line, fmt::format("missing field \"{}\"", key));
  }
  return *it;
}

std::string StringField(const json& doc, const char* key,
                        const std::string& source, std::size_t line) {
  const json& v = Field(doc, key, source, line);
  if (!v.is_string()) {
    throw ValidationError(source, line, fmt::format("\"{}\" must be a string", key));
  }
  return v.get<std::string>();
}

// Integer id in [0, bound). `what` names the id kind for messages.
std::int32_t IdValue(const json& v, const char* key, std::size_t bound,
                     const char* what, const std::string& source,
                     std::size_t line) {
  if (!v.is_number_integer()) {
    throw ValidationError(source, line, fmt::format("\"{}\" must be an integer", key));
  }
  bool in_range;
  std::int64_t value = 0;
  if (v.is_number_unsigned()) {
    const auto u = v.get<std::uint64_t>();
    in_range = u < bound;
    value = in_range ? static_cast<std::int64_t>(u) : 0;
  } else {
    value = v.get<std::int64_t>();
    in_range = value >= 0 && static_cast<std::uint64_t>(value) < bound;
  }
  if (!in_range) {
    throw ValidationError(source, line,
                          fmt::format("{} id out of range ({} = {}, expected [0,{}))",
                                      what, key, v.dump(), bound));
  }
  return static_cast<std::int32_t>(value);
}

double RealValue(const json& v, const char* key, const std::string& source,
                 std::size_t line) {
  if (!v.is_number()) {
    throw ValidationError(source, line, fmt::format("\"{}\" must be a number", key));
  }
  return v.get<double>();
}

}  // namespace

const char* to_string(DatasetKind kind) {
  return kind == DatasetKind::kTextureProbe ? "texture-probe" : "image-probe";
}

DatasetKind dataset_kind_from_string(const std::string& text) {
  if (text == "texture-probe") return DatasetKind::kTextureProbe;
  if (text == "image-probe") return DatasetKind::kImageProbe;
  throw InvalidArgument("unknown dataset kind '" + text + "'");
}

std::string manifest_path_for(const std::string& records_path) {
  return records_path + ".manifest.json";
}

DatasetManifest read_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInputError("cannot open manifest " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path, 0, std::string("malformed manifest JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError(path, 0, "manifest must be an object");

  DatasetManifest m;
  m.dataset_id = StringField(doc, "dataset_id", path, 0);
  const json& count = Field(doc, "record_count", path, 0);
  if (!count.is_number_integer() || count.get<std::int64_t>() < 0) {
    throw ValidationError(path, 0, "\"record_count\" must be a nonnegative integer");
  }
  m.record_count = count.get<std::int64_t>();
  m.registry_hash = StringField(doc, "registry_hash", path, 0);
  try {
    m.kind = dataset_kind_from_string(StringField(doc, "kind", path, 0));
  } catch (const InvalidArgument& e) {
    throw ValidationError(path, 0, e.what());
  }
  if (auto it = doc.find("seed"); it != doc.end() && !it->is_null()) {
    if (!it->is_number_unsigned()) {
      throw ValidationError(path, 0, "\"seed\" must be a nonnegative integer");
    }
    m.seed = it->get<std::uint64_t>();
  }
  json extra = json::object();
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& k = it.key();
    if (k != "dataset_id" && k != "record_count" && k != "registry_hash" &&
        k != "kind" && k != "seed") {
      extra[k] = it.value();
    }
  }
  m.extra_json = extra.dump();
  return m;
}

void write_manifest(const std::string& path, const DatasetManifest& manifest) {
  ordered_json doc;
  doc["dataset_id"] = manifest.dataset_id;
  doc["record_count"] = manifest.record_count;
  doc["registry_hash"] = manifest.registry_hash;
  doc["kind"] = to_string(manifest.kind);
  if (manifest.seed) {
    doc["seed"] = *manifest.seed;
  } else {
    doc["seed"] = nullptr;
  }
  const json extra = json::parse(manifest.extra_json);
  for (auto it = extra.begin(); it != extra.end(); ++it) {
    doc[it.key()] = it.value();
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kInternal, "cannot write " + path);
  out << doc.dump(2) << '\n';
}

std::string to_jsonl(const TextureProbeRecord& record) {
  ordered_json doc;
  doc["record_id"] = record.record_id;
  doc["texture_class_id"] = record.texture_class_id;
  doc["predicted_object_id"] = record.predicted_object_id;
  doc["confidence"] = record.confidence;
  return doc.dump();
}

std::string to_jsonl(const ImageProbeRecord& record) {
  ordered_json doc;
  doc["record_id"] = record.record_id;
  doc["dataset_id"] = record.dataset_id;
  if (record.true_label_id) {
    doc["true_label_id"] = *record.true_label_id;
  } else {
    doc["true_label_id"] = nullptr;
  }
  doc["probs"] = record.probs;
  return doc.dump();
}

TextureProbeRecord parse_texture_record(const std::string& text,
                                        const ClassRegistry& registry,
                                        const std::string& source,
                                        std::size_t line) {
  const json doc = ParseObject(text, source, line);
  TextureProbeRecord r;
  r.record_id = StringField(doc, "record_id", source, line);
  r.texture_class_id =
      IdValue(Field(doc, "texture_class_id", source, line), "texture_class_id",
              registry.texture_count(), "texture", source, line);
  r.predicted_object_id =
      IdValue(Field(doc, "predicted_object_id", source, line),
              "predicted_object_id", registry.object_count(), "object", source, line);
  r.confidence = RealValue(Field(doc, "confidence", source, line), "confidence",
                           source, line);
  if (!(r.confidence >= 0.0 && r.confidence <= 1.0)) {
    throw ValidationError(source, line,
                          fmt::format("confidence {} outside [0,1]", r.confidence));
  }
  return r;
}

ImageProbeRecord parse_image_record(const std::string& text,
                                    const ClassRegistry& registry,
                                    const std::string& source,
                                    std::size_t line) {
  const json doc = ParseObject(text, source, line);
  ImageProbeRecord r;
  r.record_id = StringField(doc, "record_id", source, line);
  r.dataset_id = StringField(doc, "dataset_id", source, line);
  if (auto it = doc.find("true_label_id"); it != doc.end() && !it->is_null()) {
    r.true_label_id = IdValue(*it, "true_label_id", registry.object_count(),
                              "label", source, line);
  }
  const json& probs = Field(doc, "probs", source, line);
  if (!probs.is_array()) {
    throw ValidationError(source, line, "\"probs\" must be an array");
  }
  if (probs.size() != registry.object_count()) {
    throw ValidationError(source, line,
                          fmt::format("probs length {} does not match {} object classes",
                                      probs.size(), registry.object_count()));
  }
  r.probs.reserve(probs.size());
  double sum = 0.0;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    if (!probs[j].is_number()) {
      throw ValidationError(source, line, fmt::format("probs[{}] is not a number", j));
    }
    const double p = probs[j].get<double>();
    if (!(p >= 0.0)) {
      throw ValidationError(source, line, fmt::format("negative probability probs[{}] = {}", j, p));
    }
    r.probs.push_back(p);
    sum += p;
  }
  if (std::abs(sum - 1.0) > kProbSumTolerance) {
    throw ValidationError(source, line,
                          fmt::format("probs sum {} outside 1 +/- {}", sum, kProbSumTolerance));
  }
  return r;
}

template <typename Record>
JsonlReader<Record>::JsonlReader(const std::string& path,
                                 const ClassRegistry& registry)
    : owned_(std::make_unique<std::ifstream>(path, std::ios::binary)),
      in_(owned_.get()),
      source_(path),
      registry_(&registry) {
  if (!*owned_) throw MissingInputError("cannot open " + path);
}

template <typename Record>
JsonlReader<Record>::JsonlReader(std::istream& in, std::string source,
                                 const ClassRegistry& registry)
    : in_(&in), source_(std::move(source)), registry_(&registry) {}

template <typename Record>
std::optional<Record> JsonlReader<Record>::next() {
  while (std::getline(*in_, buffer_)) {
    ++line_;
    if (IsBlank(buffer_)) continue;
    if constexpr (std::is_same_v<Record, TextureProbeRecord>) {
      return parse_texture_record(buffer_, *registry_, source_, line_);
    } else {
      return parse_image_record(buffer_, *registry_, source_, line_);
    }
  }
  if (in_->bad()) {
    throw MissingInputError(fmt::format("read failure in {} after line {}", source_, line_));
  }
  return std::nullopt;
}

template class JsonlReader<TextureProbeRecord>;
template class JsonlReader<ImageProbeRecord>;

std::vector<TextureProbeRecord> read_texture_records(const std::string& path,
                                                     const ClassRegistry& registry) {
  TextureRecordReader reader(path, registry);
  std::vector<TextureProbeRecord> out;
  while (auto r = reader.next()) out.push_back(std::move(*r));
  return out;
}

std::vector<ImageProbeRecord> read_image_records(const std::string& path,
                                                 const ClassRegistry& registry) {
  ImageRecordReader reader(path, registry);
  std::vector<ImageProbeRecord> out;
  while (auto r = reader.next()) out.push_back(std::move(*r));
  return out;
}

namespace {

template <typename Record>
void WriteLines(const std::string& path, std::span<const Record> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kInternal, "cannot write " + path);
  for (const auto& r : records) out << to_jsonl(r) << '\n';
  if (!out) throw Error(ErrorCode::kInternal, "write failed for " + path);
}

}  // namespace

void write_texture_records(const std::string& path,
                           std::span<const TextureProbeRecord> records) {
  WriteLines(path, records);
}

void write_image_records(const std::string& path,
                         std::span<const ImageProbeRecord> records) {
  WriteLines(path, records);
}

}  // namespace texbias
