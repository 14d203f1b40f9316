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

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "texbias/error.hpp"

namespace texbias {
namespace {

using testing::TempDir;
using testing::WriteText;

TEST(RegistryTest, MinimalRegistry) {
  const auto reg = parse_registry(R"({"textures": ["grid", "dotted"], "objects": ["a", "b", "c"]})",
                                  "reg.json");
  EXPECT_EQ(reg.texture_count(), 2u);
  EXPECT_EQ(reg.object_count(), 3u);
  EXPECT_EQ(reg.texture_name(0), "grid");
  EXPECT_EQ(reg.object_name(2), "c");
}

TEST(RegistryTest, FullScaleShape) {
  std::string textures, objects;
  for (int i = 0; i < 56; ++i) textures += (i ? "," : "") + std::string("\"t") + std::to_string(i) + "\"";
  for (int j = 0; j < 1000; ++j) objects += (j ? "," : "") + std::string("\"o") + std::to_string(j) + "\"";
  const auto reg = parse_registry("{\"textures\":[" + textures + "],\"objects\":[" + objects + "]}",
                                  "reg.json");
  EXPECT_EQ(reg.texture_count(), 56u);
  EXPECT_EQ(reg.object_count(), 1000u);
  EXPECT_EQ(reg.texture_count() * reg.object_count(), 56000u);
}

TEST(RegistryTest, DuplicateNameReportsItsLine) {
  const std::string text =
      "{\n"
      "  \"textures\": [\n"
      "    \"grid\",\n"
      "    \"dotted\",\n"
      "    \"grid\"\n"
      "  ],\n"
      "  \"objects\": [\"a\", \"b\"]\n"
      "}\n";
  try {
    parse_registry(text, "reg.json");
    FAIL() << "expected a duplicate-name error";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.line(), 5u);
    EXPECT_NE(std::string(e.what()).find("duplicate texture name \"grid\""), std::string::npos)
        << e.what();
  }
}

TEST(RegistryTest, EmptyListReportsKeyLine) {
  const std::string text = "{\n\"textures\": [],\n\"objects\": [\"a\", \"b\"]\n}";
  try {
    parse_registry(text, "reg.json");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("empty textures list"), std::string::npos);
  }
}

TEST(RegistryTest, MalformedJsonReportsLine) {
  try {
    parse_registry("{\n\"textures\": [\"a\", \"b\"],\n\"objects\": [\"a\" \"b\"]\n}", "reg.json");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(RegistryTest, RejectsSingletonListsAndNonStrings) {
  EXPECT_THROW(parse_registry(R"({"textures": ["a"], "objects": ["a", "b"]})", "r"), ValidationError);
  EXPECT_THROW(parse_registry(R"({"textures": ["a", 3], "objects": ["a", "b"]})", "r"), ValidationError);
  EXPECT_THROW(parse_registry(R"({"objects": ["a", "b"]})", "r"), ValidationError);
  EXPECT_THROW(parse_registry(R"(["a"])", "r"), ValidationError);
}

TEST(RegistryTest, SameNameAcrossListsIsAllowed) {
  EXPECT_NO_THROW(parse_registry(R"({"textures": ["x", "y"], "objects": ["x", "y"]})", "r"));
}

TEST(RegistryTest, UnreadableFileIsMissingInput) {
  try {
    load_registry("/nonexistent/registry.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingInput);
    EXPECT_NE(std::string(e.what()).find("/nonexistent/registry.json"), std::string::npos);
  }
}

TEST(RegistryTest, WriteLoadRoundTripKeepsHash) {
  TempDir dir;
  const ClassRegistry reg({"banded", "zig, zagged"}, {"tench, Tinca tinca", "goldfish"});
  write_registry(dir.file("r.json"), reg);
  const auto back = load_registry(dir.file("r.json"));
  EXPECT_EQ(back, reg);
  EXPECT_EQ(back.hash(), reg.hash());
  EXPECT_EQ(reg.hash().size(), 64u);
}

TEST(RegistryTest, HashIsSha256OfCanonicalJson) {
  const ClassRegistry reg({"a", "b"}, {"c", "d"});
  EXPECT_EQ(reg.to_json_text(), R"({"objects":["c","d"],"textures":["a","b"]})");
  // sha256 of the string above, computed with coreutils sha256sum.
  EXPECT_EQ(reg.hash(), "0170cd36b1cccfc574ca9cc9e11c5a733cf3c98b5522e2fc8eb364f308d235fd");
}

}  // namespace
}  // namespace texbias
