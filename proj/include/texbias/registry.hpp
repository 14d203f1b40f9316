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
#include <string>
#include <string_view>
#include <vector>

namespace texbias {

// Ordered texture and object class names. A class id is its 0-based position.
class ClassRegistry {
 public:
  ClassRegistry() = default;

  // Validates the invariants (>= 2 names per list, unique within a list) and
  // throws ValidationError with `source` attached on violation.
  ClassRegistry(std::vector<std::string> texture_names,
                std::vector<std::string> object_names,
                const std::string& source = "<registry>");

  std::size_t texture_count() const { return texture_names_.size(); }
  std::size_t object_count() const { return object_names_.size(); }

  const std::vector<std::string>& texture_names() const { return texture_names_; }
  const std::vector<std::string>& object_names() const { return object_names_; }
  const std::string& texture_name(std::size_t id) const { return texture_names_.at(id); }
  const std::string& object_name(std::size_t id) const { return object_names_.at(id); }

  // Lowercase hex SHA-256 of the canonical registry JSON, i.e. the compact
  // serialization of {"objects":[...],"textures":[...]} with keys sorted and
  // names emitted as UTF-8.
  std::string hash() const;

  std::string to_json_text() const;

  friend bool operator==(const ClassRegistry&, const ClassRegistry&) = default;

 private:
  std::vector<std::string> texture_names_;
  std::vector<std::string> object_names_;
};

// Registry file: {"textures": [names], "objects": [names]}. Errors carry the
// line of the offending entry.
ClassRegistry parse_registry(std::string_view text, const std::string& source);
ClassRegistry load_registry(const std::string& path);
void write_registry(const std::string& path, const ClassRegistry& registry);

}  // namespace texbias
