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

#include "texbias/humaneval.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "json.hpp"
#include "texbias/csv.hpp"
#include "texbias/error.hpp"
#include "texbias/rng.hpp"

namespace texbias {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr const char* kSamplingProcedure =
    "items: partial Fisher-Yates over assignment positions, for i in [0,count) swap "
    "i with i+below(N-i); distractors: partial Fisher-Yates over the ascending "
    "non-TID texture ids, 3 steps; display order: options [tid,d0,d1,d2] then "
    "Fisher-Yates for i=3..1 swap i with below(i+1). One generator, consumed in "
    "that order, item by item.";

template <typename T>
void PartialShuffle(std::vector<T>& values, std::size_t steps, SeededRng& rng) {
  for (std::size_t i = 0; i < steps; ++i) {
    const std::size_t j = i + rng.below(values.size() - i);
    std::swap(values[i], values[j]);
  }
}

}  // namespace

EvalPackage pack(std::span<const TidAssignment> assignments,
                 const std::map<std::string, std::string>& image_refs, std::size_t count,
                 std::uint64_t seed, const ClassRegistry& registry,
                 std::string package_id) {
  const std::size_t n = registry.texture_count();
  if (n < kEvalOptions) {
    throw InvalidArgument(
        fmt::format("human evaluation needs at least {} textures, registry has {}",
                    kEvalOptions, n));
  }
  if (count > assignments.size()) {
    throw InvalidArgument(fmt::format("requested {} items but only {} assignments exist",
                                      count, assignments.size()));
  }
  SeededRng rng(seed);
  std::vector<std::size_t> positions(assignments.size());
  std::iota(positions.begin(), positions.end(), std::size_t{0});
  PartialShuffle(positions, count, rng);

  EvalPackage package;
  package.package_id =
      package_id.empty() ? fmt::format("pkg-s{}-n{}", seed, count) : std::move(package_id);
  package.seed = seed;
  package.items.reserve(count);

  std::vector<std::int32_t> pool;
  pool.reserve(n - 1);
  for (std::size_t p = 0; p < count; ++p) {
    const TidAssignment& a = assignments[positions[p]];
    if (a.texture_id < 0 || static_cast<std::size_t>(a.texture_id) >= n) {
      throw InvalidArgument(fmt::format("record {} has texture id {} outside the registry",
                                        a.record_id, a.texture_id));
    }
    pool.clear();
    for (std::size_t t = 0; t < n; ++t) {
      if (static_cast<std::int32_t>(t) != a.texture_id) pool.push_back(static_cast<std::int32_t>(t));
    }
    PartialShuffle(pool, kEvalOptions - 1, rng);

    EvalItem item;
    item.record_id = a.record_id;
    auto ref = image_refs.find(a.record_id);
    item.image_ref = ref == image_refs.end() ? a.record_id : ref->second;
    item.options = {a.texture_id, pool[0], pool[1], pool[2]};
    for (std::size_t i = kEvalOptions - 1; i > 0; --i) {
      std::swap(item.options[i], item.options[rng.below(i + 1)]);
    }
    for (std::size_t i = 0; i < kEvalOptions; ++i) {
      if (item.options[i] == a.texture_id) item.tid_option_index = static_cast<std::int32_t>(i);
      item.option_names[i] = registry.texture_name(static_cast<std::size_t>(item.options[i]));
    }
    package.items.push_back(std::move(item));
  }
  return package;
}

AgreementScore score(const EvalPackage& package, const EvalResponse& response) {
  if (!response.entries.empty() && response.package_id != package.package_id) {
    throw ValidationError("", 0,
                          fmt::format("unknown package_id '{}' (expected '{}')",
                                      response.package_id, package.package_id));
  }
  std::unordered_map<std::string, const EvalItem*> items;
  for (const auto& item : package.items) items.emplace(item.record_id, &item);

  std::map<std::int32_t, TextureAgreement> per_texture;
  std::set<std::string> seen;
  AgreementScore result;
  for (const auto& entry : response.entries) {
    auto it = items.find(entry.record_id);
    if (it == items.end()) {
      throw ValidationError("", 0,
                            fmt::format("record '{}' is not in package '{}'",
                                        entry.record_id, package.package_id));
    }
    if (!seen.insert(entry.record_id).second) {
      throw ValidationError("", 0, fmt::format("record '{}' answered twice", entry.record_id));
    }
    if (entry.selected.empty()) {
      throw ValidationError("", 0, fmt::format("record '{}' has no selection", entry.record_id));
    }
    for (auto s : entry.selected) {
      if (s < 0 || s >= static_cast<std::int32_t>(kEvalOptions)) {
        throw ValidationError("", 0,
                              fmt::format("selection index {} out of range [0,{}) for record '{}'",
                                          s, kEvalOptions, entry.record_id));
      }
    }
    const EvalItem& item = *it->second;
    const bool agrees = std::find(entry.selected.begin(), entry.selected.end(),
                                  item.tid_option_index) != entry.selected.end();
    TextureAgreement& t = per_texture[item.tid_texture()];
    t.texture_id = item.tid_texture();
    t.texture_name = item.option_names[static_cast<std::size_t>(item.tid_option_index)];
    ++t.answered;
    ++result.answered;
    if (agrees) {
      ++t.agreed;
      ++result.agreed;
    }
  }
  for (auto& [id, t] : per_texture) result.per_texture.push_back(std::move(t));
  return result;
}

std::string package_to_json(const EvalPackage& package) {
  ordered_json doc;
  doc["package_id"] = package.package_id;
  doc["seed"] = package.seed;
  doc["rng"] = SeededRng::kAlgorithm;
  doc["sampling"] = kSamplingProcedure;
  doc["hidden_fields"] = ordered_json::array({"tid_option_index"});
  ordered_json items = ordered_json::array();
  for (const auto& item : package.items) {
    ordered_json j;
    j["record_id"] = item.record_id;
    j["image_ref"] = item.image_ref;
    j["options"] = item.options;
    j["option_names"] = item.option_names;
    j["tid_option_index"] = item.tid_option_index;
    items.push_back(std::move(j));
  }
  doc["items"] = std::move(items);
  return doc.dump(2) + "\n";
}

EvalPackage package_from_json(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(source, 0, std::string("malformed package JSON: ") + e.what());
  }
  EvalPackage package;
  try {
    package.package_id = doc.at("package_id").get<std::string>();
    package.seed = doc.at("seed").get<std::uint64_t>();
    for (const auto& j : doc.at("items")) {
      EvalItem item;
      item.record_id = j.at("record_id").get<std::string>();
      item.image_ref = j.at("image_ref").get<std::string>();
      const auto options = j.at("options").get<std::vector<std::int32_t>>();
      const auto names = j.at("option_names").get<std::vector<std::string>>();
      if (options.size() != kEvalOptions || names.size() != kEvalOptions) {
        throw ValidationError(source, 0,
                              fmt::format("item '{}' must have {} options", item.record_id,
                                          kEvalOptions));
      }
      std::copy(options.begin(), options.end(), item.options.begin());
      std::copy(names.begin(), names.end(), item.option_names.begin());
      if (std::set<std::int32_t>(options.begin(), options.end()).size() != kEvalOptions) {
        throw ValidationError(source, 0,
                              fmt::format("item '{}' has repeated options", item.record_id));
      }
      item.tid_option_index = j.at("tid_option_index").get<std::int32_t>();
      if (item.tid_option_index < 0 ||
          item.tid_option_index >= static_cast<std::int32_t>(kEvalOptions)) {
        throw ValidationError(source, 0,
                              fmt::format("item '{}' has tid_option_index out of range",
                                          item.record_id));
      }
      package.items.push_back(std::move(item));
    }
  } catch (const json::exception& e) {
    throw ValidationError(source, 0, std::string("invalid package: ") + e.what());
  }
  return package;
}

void write_package(const std::string& path, const EvalPackage& package) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kInternal, "cannot write " + path);
  out << package_to_json(package);
}

EvalPackage read_package(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInputError("cannot open package " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return package_from_json(buffer.str(), path);
}

void write_response_csv(std::ostream& out, const EvalResponse& response) {
  CsvWriter csv(out);
  csv.row({"package_id", "record_id", "selected_indices"});
  for (const auto& e : response.entries) {
    csv.row({response.package_id, e.record_id, fmt::format("{}", fmt::join(e.selected, ";"))});
  }
}

EvalResponse parse_response_csv(std::istream& in, const std::string& source) {
  const CsvTable table = parse_csv(in, source);
  const std::size_t c_pkg = table.column("package_id", source);
  const std::size_t c_rec = table.column("record_id", source);
  const std::size_t c_sel = table.column("selected_indices", source);
  EvalResponse response;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = table.row_lines[r];
    if (r == 0) {
      response.package_id = row[c_pkg];
    } else if (row[c_pkg] != response.package_id) {
      throw ValidationError(source, line, "mixed package_id values in one response file");
    }
    EvalResponseEntry entry;
    entry.record_id = row[c_rec];
    std::string_view sel = row[c_sel];
    while (!sel.empty()) {
      const auto cut = sel.find(';');
      const auto token = sel.substr(0, cut);
      entry.selected.push_back(
          static_cast<std::int32_t>(parse_int_field(token, source, line, "selected index")));
      if (cut == std::string_view::npos) break;
      sel.remove_prefix(cut + 1);
    }
    if (entry.selected.empty()) {
      throw ValidationError(source, line, "empty selection");
    }
    response.entries.push_back(std::move(entry));
  }
  return response;
}

EvalResponse read_response_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInputError("cannot open responses " + path);
  return parse_response_csv(in, path);
}

void write_agreement_csv(std::ostream& out, const AgreementScore& result) {
  CsvWriter csv(out);
  csv.row({"scope", "texture_id", "texture_name", "answered", "agreed", "rate"});
  for (const auto& t : result.per_texture) {
    csv.row({"texture", std::to_string(t.texture_id), t.texture_name,
             std::to_string(t.answered), std::to_string(t.agreed), format_real(t.rate())});
  }
  csv.row({"overall", "", "", std::to_string(result.answered), std::to_string(result.agreed),
           format_optional_real(result.overall())});
}

std::map<std::string, std::string> read_image_refs(const std::string& path) {
  const CsvTable table = read_csv_file(path);
  const std::size_t c_rec = table.column("record_id", path);
  const std::size_t c_ref = table.column("image_ref", path);
  std::map<std::string, std::string> refs;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (!refs.emplace(table.rows[r][c_rec], table.rows[r][c_ref]).second) {
      throw ValidationError(path, table.row_lines[r], "duplicate record_id");
    }
  }
  return refs;
}

}  // namespace texbias
