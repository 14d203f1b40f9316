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

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "texbias/registry.hpp"
#include "texbias/tid.hpp"

namespace texbias {

inline constexpr std::size_t kEvalOptions = 4;

struct EvalItem {
  std::string record_id;
  std::string image_ref;
  std::array<std::int32_t, kEvalOptions> options{};  // texture ids, display order
  std::array<std::string, kEvalOptions> option_names;
  std::int32_t tid_option_index = 0;  // hidden from annotators

  std::int32_t tid_texture() const {
    return options[static_cast<std::size_t>(tid_option_index)];
  }

  friend bool operator==(const EvalItem&, const EvalItem&) = default;
};

struct EvalPackage {
  std::string package_id;
  std::uint64_t seed = 0;
  std::vector<EvalItem> items;

  friend bool operator==(const EvalPackage&, const EvalPackage&) = default;
};

// Draws `count` assignments uniformly without replacement, then per item the
// TID texture plus 3 distinct distractors drawn uniformly from the other
// textures, shown in shuffled order. Every random choice goes through
// SeededRng(seed), so the package is a pure function of its inputs.
// Records missing from `image_refs` use their record_id as image_ref.
EvalPackage pack(std::span<const TidAssignment> assignments,
                 const std::map<std::string, std::string>& image_refs, std::size_t count,
                 std::uint64_t seed, const ClassRegistry& registry,
                 std::string package_id = {});

struct EvalResponseEntry {
  std::string record_id;
  std::vector<std::int32_t> selected;  // option indices in [0, 4)
};

struct EvalResponse {
  std::string package_id;
  std::vector<EvalResponseEntry> entries;
};

struct TextureAgreement {
  std::int32_t texture_id = 0;
  std::string texture_name;
  std::int64_t answered = 0;
  std::int64_t agreed = 0;
  double rate() const {
    return answered == 0 ? 0.0 : static_cast<double>(agreed) / static_cast<double>(answered);
  }
};

struct AgreementScore {
  std::int64_t answered = 0;
  std::int64_t agreed = 0;
  std::vector<TextureAgreement> per_texture;  // sorted by texture id

  std::optional<double> overall() const {
    if (answered == 0) return std::nullopt;
    return static_cast<double>(agreed) / static_cast<double>(answered);
  }
};

// An item agrees when its TID option is among the selected indices.
AgreementScore score(const EvalPackage& package, const EvalResponse& response);

std::string package_to_json(const EvalPackage& package);
EvalPackage package_from_json(const std::string& text, const std::string& source);
void write_package(const std::string& path, const EvalPackage& package);
EvalPackage read_package(const std::string& path);

// Response CSV: package_id,record_id,selected_indices with indices joined by
// ';' (e.g. "1;3").
void write_response_csv(std::ostream& out, const EvalResponse& response);
EvalResponse parse_response_csv(std::istream& in, const std::string& source);
EvalResponse read_response_csv(const std::string& path);

// agreement.csv: scope,texture_id,texture_name,answered,agreed,rate with one
// "texture" row per TID texture and a final "overall" row.
void write_agreement_csv(std::ostream& out, const AgreementScore& score);

// record_id,image_ref CSV.
std::map<std::string, std::string> read_image_refs(const std::string& path);

}  // namespace texbias
