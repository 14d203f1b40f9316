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

#include "texbias/registry.hpp"

#include <fstream>
#include <iterator>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "json.hpp"
#include "texbias/error.hpp"

namespace texbias {
namespace {

using nlohmann::json;

std::size_t LineOfByte(std::string_view text, std::size_t byte) {
  const std::size_t end = std::min(byte, text.size());
  std::size_t line = 1;
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

// Source lines of the elements of the top-level "textures" and "objects"
// arrays, plus the line of each key. Only called on text nlohmann already
// accepted, so the scan can assume well-formed JSON.
struct EntryLines {
  std::vector<std::size_t> textures;
  std::vector<std::size_t> objects;
  std::size_t textures_key = 0;
  std::size_t objects_key = 0;
};

EntryLines ScanEntryLines(std::string_view text) {
  EntryLines out;
  std::size_t line = 1;
  int depth = 0;
  std::string last_string;
  std::size_t last_string_line = 0;
  std::string key;
  std::vector<std::size_t>* active = nullptr;

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
    } else if (c == '"') {
      const std::size_t start_line = line;
      std::string raw;
      for (++i; i < text.size() && text[i] != '"'; ++i) {
        if (text[i] == '\\') {
          raw.push_back(text[i++]);
        }
        if (i < text.size() && text[i] == '\n') ++line;
        if (i < text.size()) raw.push_back(text[i]);
      }
      if (depth == 1) {
        last_string = raw;
        last_string_line = start_line;
      } else if (depth == 2 && active != nullptr) {
        active->push_back(start_line);
      }
    } else if (c == ':' && depth == 1) {
      key = last_string;
      if (key == "textures") out.textures_key = last_string_line;
      if (key == "objects") out.objects_key = last_string_line;
    } else if (c == '{' || c == '[') {
      ++depth;
      if (c == '[' && depth == 2) {
        if (key == "textures") active = &out.textures;
        if (key == "objects") active = &out.objects;
      }
    } else if (c == '}' || c == ']') {
      if (depth == 2) active = nullptr;
      --depth;
    }
  }
  return out;
}

void CheckNames(const std::vector<std::string>& names, std::string_view list,
                const std::string& source, std::size_t key_line,
                const std::vector<std::size_t>& entry_lines) {
  auto line_of = [&](std::size_t index) {
    return index < entry_lines.size() ? entry_lines[index] : key_line;
  };
  if (names.empty()) {
    throw ValidationError(source, key_line, fmt::format("empty {} list", list));
  }
  if (names.size() < 2) {
    throw ValidationError(source, key_line,
                          fmt::format("{} list needs at least 2 names", list));
  }
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i].empty()) {
      throw ValidationError(source, line_of(i),
                            fmt::format("empty name in {} list", list));
    }
    auto [it, inserted] = seen.emplace(names[i], i);
    if (!inserted) {
      throw ValidationError(
          source, line_of(i),
          fmt::format("duplicate {} name \"{}\" (first at index {})",
                      list == "textures" ? "texture" : "object", names[i],
                      it->second));
    }
  }
}

std::vector<std::string> ReadNameList(const json& doc, const char* key,
                                      const std::string& source,
                                      std::size_t key_line,
                                      const std::vector<std::size_t>& lines) {
  if (!doc.contains(key)) {
    throw ValidationError(source, 0, fmt::format("missing \"{}\" list", key));
  }
  const json& list = doc.at(key);
  if (!list.is_array()) {
    throw ValidationError(source, key_line,
                          fmt::format("\"{}\" must be an array", key));
  }
  std::vector<std::string> names;
  names.reserve(list.size());
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (!list[i].is_string()) {
      throw ValidationError(source, i < lines.size() ? lines[i] : key_line,
                            fmt::format("{}[{}] is not a string", key, i));
    }
    names.push_back(list[i].get<std::string>());
  }
  return names;
}

}  // namespace

ClassRegistry::ClassRegistry(std::vector<std::string> texture_names,
                             std::vector<std::string> object_names,
                             const std::string& source)
    : texture_names_(std::move(texture_names)),
      object_names_(std::move(object_names)) {
  CheckNames(texture_names_, "textures", source, 0, {});
  CheckNames(object_names_, "objects", source, 0, {});
}

std::string ClassRegistry::to_json_text() const {
  json doc = json::object();
  doc["objects"] = object_names_;
  doc["textures"] = texture_names_;
  return doc.dump();
}

std::string ClassRegistry::hash() const {
  const std::string canonical = to_json_text();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(canonical.data(), canonical.size(), digest, &length,
                 EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kInternal, "SHA-256 digest failed");
  }
  std::string hex;
  hex.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    hex += fmt::format("{:02x}", digest[i]);
  }
  return hex;
}

ClassRegistry parse_registry(std::string_view text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ValidationError(source, LineOfByte(text, e.byte),
                          "malformed registry JSON");
  }
  if (!doc.is_object()) {
    throw ValidationError(source, 1, "registry must be a JSON object");
  }
  const EntryLines lines = ScanEntryLines(text);
  auto textures =
      ReadNameList(doc, "textures", source, lines.textures_key, lines.textures);
  auto objects =
      ReadNameList(doc, "objects", source, lines.objects_key, lines.objects);
  CheckNames(textures, "textures", source, lines.textures_key, lines.textures);
  CheckNames(objects, "objects", source, lines.objects_key, lines.objects);
  return ClassRegistry(std::move(textures), std::move(objects), source);
}

ClassRegistry load_registry(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInputError("cannot open registry " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  if (in.bad()) throw MissingInputError("cannot read registry " + path);
  return parse_registry(text, path);
}

void write_registry(const std::string& path, const ClassRegistry& registry) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kInternal, "cannot write " + path);
  json doc = json::object();
  doc["textures"] = registry.texture_names();
  doc["objects"] = registry.object_names();
  out << doc.dump(2) << '\n';
}

}  // namespace texbias
