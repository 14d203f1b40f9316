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

// Drives the texbias executable end to end.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "test_support.hpp"
#include "texbias/csv.hpp"
#include "texbias/humaneval.hpp"
#include "texbias/records.hpp"
#include "texbias/registry.hpp"
#include "texbias/tav.hpp"
#include "texbias/tid.hpp"

namespace texbias {
namespace {

namespace fs = std::filesystem;
using testing::ReadText;
using testing::TempDir;
using testing::WriteText;

struct Result {
  int code = -1;
  std::string output;  // stdout and stderr interleaved
};

Result Cli(const std::string& args) {
  const std::string command = std::string(TEXBIAS_CLI) + " " + args + " 2>&1";
  Result r;
  FILE* pipe = ::popen(command.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buffer;
  std::size_t n;
  while ((n = std::fread(buffer.data(), 1, buffer.size(), pipe)) > 0) r.output.append(buffer.data(), n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string Q(const std::string& path) { return "'" + path + "'"; }

// Planted fixture written by `texbias synth`.
std::string Synth(const TempDir& dir, const std::string& extra = "--seed 7") {
  const std::string out = dir.file("fixture");
  const auto r = Cli("synth --out " + Q(out) + " " + extra);
  EXPECT_EQ(r.code, 0) << r.output;
  return out;
}

std::string InputFlags(const std::string& f) {
  return "--registry " + Q(f + "/registry.json") + " --texture-records " +
         Q(f + "/texture_records.jsonl") + " --val-records " + Q(f + "/val_records.jsonl");
}

CsvTable Csv(const std::string& path) { return read_csv_file(path); }

TEST(CliTest, HelpAndUsageErrors) {
  EXPECT_EQ(Cli("--help").code, 0);
  EXPECT_EQ(Cli("").code, 1);
  EXPECT_EQ(Cli("frobnicate").code, 1);
  EXPECT_EQ(Cli("tav --out /tmp/x --workers 0").code, 1);
  EXPECT_EQ(Cli("tav --out /tmp/x --entropy bits").code, 1);
}

TEST(CliValidateTest, SynthFixturePasses) {
  TempDir dir;
  const auto f = Synth(dir);
  const auto r = Cli("validate " + InputFlags(f) + " --adv-records " + Q(f + "/adv_records.jsonl"));
  EXPECT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("ok: "), std::string::npos);
}

TEST(CliValidateTest, CorruptedLineReportsLineNumber) {
  TempDir dir;
  const auto f = Synth(dir);
  std::istringstream in(ReadText(f + "/val_records.jsonl"));
  std::string line, text;
  for (int k = 1; std::getline(in, line); ++k) text += (k == 3 ? std::string("{\"record_id\": ") : line) + "\n";
  WriteText(f + "/val_records.jsonl", text);
  const auto r = Cli("validate " + InputFlags(f));
  EXPECT_EQ(r.code, 1) << r.output;
  EXPECT_NE(r.output.find("val_records.jsonl:3:"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("at line 3"), std::string::npos) << r.output;
}

TEST(CliValidateTest, ManifestCountMismatch) {
  TempDir dir;
  const auto f = Synth(dir);
  const auto text = ReadText(f + "/texture_records.jsonl");
  WriteText(f + "/texture_records.jsonl", text.substr(0, text.find('\n') + 1));
  const auto r = Cli("validate " + InputFlags(f));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("record_count"), std::string::npos) << r.output;
}

TEST(CliValidateTest, MissingFileNamesPath) {
  TempDir dir;
  const auto f = Synth(dir);
  const auto r = Cli("validate --registry " + Q(f + "/registry.json") + " --texture-records " +
                     Q(f + "/nope.jsonl"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find(f + "/nope.jsonl"), std::string::npos) << r.output;
  EXPECT_EQ(Cli("validate --registry " + Q(dir.file("none.json"))).code, 2);
}

TEST(CliValidateTest, DuplicateRegistryName) {
  TempDir dir;
  WriteText(dir.file("r.json"), "{\"textures\": [\"grid\", \"grid\"], \"objects\": [\"a\", \"b\"]}");
  const auto r = Cli("validate --registry " + Q(dir.file("r.json")));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("duplicate texture name \"grid\""), std::string::npos) << r.output;
}

TEST(CliTavTest, PlantedBijectionIsPermutation) {
  TempDir dir;
  const auto f = Synth(dir, "--seed 3 --noise 0");
  const auto out = dir.file("tav");
  const auto r = Cli("tav " + InputFlags(f) + " --out " + Q(out) + " --bins 20 --top-k 8");
  ASSERT_EQ(r.code, 0) << r.output;
  const auto reg = load_registry(f + "/registry.json");
  const auto t = read_tav_csv(out + "/tav.csv", reg);
  for (std::size_t i = 0; i < t.rows(); ++i) {
    int ones = 0;
    for (double v : t.row(i)) {
      EXPECT_TRUE(v == 0.0 || v == 1.0);
      ones += v == 1.0;
    }
    EXPECT_EQ(ones, 1);
  }
  const auto pairs = Csv(out + "/top_pairs.csv");
  EXPECT_EQ(pairs.header, (std::vector<std::string>{"rank", "object", "texture", "value"}));
  ASSERT_EQ(pairs.rows.size(), 8u);
  for (const auto& row : pairs.rows) EXPECT_EQ(row[3], "1");
  const auto hist = Csv(out + "/confidence_hist.csv");
  EXPECT_EQ(hist.header, (std::vector<std::string>{"bin", "lower", "upper", "count"}));
  EXPECT_EQ(hist.rows.size(), 20u);
  std::int64_t total = 0;
  for (const auto& row : hist.rows) total += std::stoll(row[3]);
  EXPECT_EQ(total, 800);
}

TEST(CliTavTest, DerivedTwoByTwo) {
  TempDir dir;
  WriteText(dir.file("r.json"), R"({"textures": ["t0", "t1"], "objects": ["o0", "o1"]})");
  std::string text;
  auto add = [&](int t, int o, int times) {
    for (int k = 0; k < times; ++k) {
      text += R"({"record_id": "x", "texture_class_id": )" + std::to_string(t) +
              R"(, "predicted_object_id": )" + std::to_string(o) + R"(, "confidence": 0.8})" "\n";
    }
  };
  add(0, 0, 3);
  add(0, 1, 1);
  add(1, 1, 4);
  WriteText(dir.file("t.jsonl"), text);
  const auto r = Cli("tav --registry " + Q(dir.file("r.json")) + " --texture-records " +
                     Q(dir.file("t.jsonl")) + " --out " + Q(dir.file("o")));
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("notice: --top-k 50 exceeds the 4 TAV cells"), std::string::npos);
  const auto t = read_tav_csv(dir.file("o/tav.csv"), load_registry(dir.file("r.json")));
  EXPECT_NEAR(t.at(0, 0), 0.14154140665565038, 1e-15);
  EXPECT_NEAR(t.at(1, 1), 0.22245752409011016, 1e-15);
  const auto pairs = Csv(dir.file("o/top_pairs.csv"));
  ASSERT_EQ(pairs.rows.size(), 4u);
  EXPECT_EQ(pairs.rows[0][1], "o1");
  EXPECT_EQ(pairs.rows[0][2], "t1");
}

TEST(CliTavTest, EmptyRecordsGiveZeroMatrix) {
  TempDir dir;
  WriteText(dir.file("r.json"), R"({"textures": ["t0", "t1"], "objects": ["o0", "o1", "o2"]})");
  WriteText(dir.file("t.jsonl"), "");
  const auto r = Cli("tav --registry " + Q(dir.file("r.json")) + " --texture-records " +
                     Q(dir.file("t.jsonl")) + " --out " + Q(dir.file("o")) + " --top-k 0");
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(ReadText(dir.file("o/tav.csv")), "texture,o0,o1,o2\nt0,0,0,0\nt1,0,0,0\n");
  EXPECT_EQ(Csv(dir.file("o/top_pairs.csv")).rows.size(), 0u);
}

TEST(CliTavTest, MissingTextureRecords) {
  TempDir dir;
  const auto f = Synth(dir);
  const auto r = Cli("tav --registry " + Q(f + "/registry.json") + " --out " + Q(dir.file("o")));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("texture-records"), std::string::npos) << r.output;
}

TEST(CliAnalyzeTest, NoiseFreeFixtureWithAdversarialSet) {
  TempDir dir;
  const auto f = Synth(dir, "--seed 11 --noise 0");
  const auto out = dir.file("a");
  const auto r = Cli("analyze " + InputFlags(f) + " --adv-records " +
                     Q(f + "/adv_records.jsonl") + " --out " + Q(out));
  ASSERT_EQ(r.code, 0) << r.output;
  for (const char* name : {"assignments.csv", "groups.csv", "dominant_textures.csv",
                           "dominance.csv", "correlations.csv", "summary.json",
                           "adv_assignments.csv", "alignment.csv", "per_label_agreement.csv",
                           "magnitude.csv"}) {
    EXPECT_TRUE(fs::exists(out + "/" + name)) << name;
  }
  const auto dominance = Csv(out + "/dominance.csv");
  ASSERT_EQ(dominance.rows.size(), 2u);
  for (const auto& row : dominance.rows) EXPECT_EQ(row[5], "0");

  // The written assignments are exactly what the library computes in-process.
  const auto reg = load_registry(f + "/registry.json");
  const auto t = tav(count_matrix(read_texture_records(f + "/texture_records.jsonl", reg), reg));
  const auto want = batch_assign(read_image_records(f + "/val_records.jsonl", reg), t);
  EXPECT_EQ(read_assignments_csv(out + "/assignments.csv", reg), want);

  const auto alignment = Csv(out + "/alignment.csv");
  ASSERT_EQ(alignment.rows.size(), 1u);
  double sum = 0;
  for (int c = 0; c < 4; ++c) sum += std::stod(alignment.rows[0][c]);
  EXPECT_NEAR(sum, 1.0, 1e-9);

  const auto summary = nlohmann::json::parse(ReadText(out + "/summary.json"));
  EXPECT_EQ(summary["validation_records"], 200);
  EXPECT_FALSE(summary["adversarial"].is_null());
}

TEST(CliAnalyzeTest, NoAdversarialInput) {
  TempDir dir;
  const auto f = Synth(dir);
  const auto out = dir.file("a");
  const auto r = Cli("analyze " + InputFlags(f) + " --out " + Q(out));
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("notice: no adversarial input"), std::string::npos) << r.output;
  EXPECT_FALSE(fs::exists(out + "/alignment.csv"));
  EXPECT_FALSE(fs::exists(out + "/per_label_agreement.csv"));
  EXPECT_FALSE(fs::exists(out + "/magnitude.csv"));
  const auto summary = nlohmann::json::parse(ReadText(out + "/summary.json"));
  EXPECT_TRUE(summary["adversarial"].is_null());
}

TEST(CliAnalyzeTest, CorrelationFixtureInSummary) {
  // One predicted class with textures at counts 1, 4, 8 (ratios affine in
  // 0.2, 0.5, 0.9) and confidences 0.1, 0.6, 0.8.
  TempDir dir;
  WriteText(dir.file("r.json"), R"({"textures": ["t0", "t1", "t2"], "objects": ["o0", "o1"]})");
  std::ostringstream csv;
  std::vector<TidAssignment> rows;
  const int counts[] = {1, 4, 8};
  const double conf[] = {0.1, 0.6, 0.8};
  for (int t = 0; t < 3; ++t) {
    for (int k = 0; k < counts[t]; ++k) {
      rows.push_back({"r" + std::to_string(t) + "-" + std::to_string(k), t, 0.5, 0, conf[t], 0});
    }
  }
  const auto reg = load_registry(dir.file("r.json"));
  write_assignments_csv(csv, rows, reg);
  WriteText(dir.file("val.csv"), csv.str());
  const auto r = Cli("analyze --registry " + Q(dir.file("r.json")) + " --val-assignments " +
                     Q(dir.file("val.csv")) + " --out " + Q(dir.file("o")));
  ASSERT_EQ(r.code, 0) << r.output;
  const auto summary = nlohmann::json::parse(ReadText(dir.file("o/summary.json")));
  EXPECT_NEAR(summary["prediction"]["correlation"].get<double>(), 0.9477, 1e-3);
  EXPECT_NEAR(summary["prediction"]["correlation"].get<double>(), 0.9476966276867814, 1e-6);
  EXPECT_TRUE(summary["label"]["correlation"].is_null());
  EXPECT_EQ(summary["prediction"]["avg_textures"], 3.0);
}

TEST(CliDeterminismTest, WorkersDoNotChangeBytes) {
  TempDir dir;
  const auto f = Synth(dir, "--seed 5 --noise 0.2 --textures 12 --objects 30 "
                            "--samples-per-texture 400 --images-per-object 60");
  const std::string adv = " --adv-records " + Q(f + "/adv_records.jsonl");
  for (const char* w : {"1", "8"}) {
    const std::string suffix = std::string("w") + w;
    ASSERT_EQ(Cli("tav " + InputFlags(f) + " --workers " + w + " --out " + Q(dir.file("tav-" + suffix))).code, 0);
    ASSERT_EQ(Cli("analyze " + InputFlags(f) + adv + " --workers " + w + " --out " +
                  Q(dir.file("an-" + suffix))).code,
              0);
  }
  for (const std::string stage : {"tav-", "an-"}) {
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(dir.file(stage + "w1"))) {
      const auto name = entry.path().filename().string();
      EXPECT_EQ(ReadText(entry.path().string()), ReadText(dir.file(stage + "w8/" + name))) << name;
      ++files;
    }
    EXPECT_EQ(files, stage == "tav-" ? 3u : 10u);
  }
}

TEST(CliTavTest, RawEntropyModeRoundTrips) {
  TempDir dir;
  const auto f = Synth(dir, "--seed 2 --noise 0.4");
  ASSERT_EQ(Cli("tav " + InputFlags(f) + " --entropy raw --out " + Q(dir.file("o"))).code, 0);
  const auto reg = load_registry(f + "/registry.json");
  const auto t = read_tav_csv(dir.file("o/tav.csv"), reg);
  const auto want = tav(count_matrix(read_texture_records(f + "/texture_records.jsonl", reg), reg),
                        EntropyMode::kRawNatural);
  EXPECT_EQ(t, want);
  const auto r = Cli("validate --registry " + Q(f + "/registry.json") + " --tav " +
                     Q(dir.file("o/tav.csv")));
  EXPECT_EQ(r.code, 0) << r.output;
}

TEST(CliHumanEvalTest, PackScoreRoundTrip) {
  TempDir dir;
  const auto f = Synth(dir, "--seed 9 --textures 10 --objects 10 --images-per-object 30");
  ASSERT_EQ(Cli("analyze " + InputFlags(f) + " --out " + Q(dir.file("a"))).code, 0);
  const auto pack_cmd = "humaneval pack --registry " + Q(f + "/registry.json") +
                        " --assignments " + Q(dir.file("a/assignments.csv")) +
                        " --count 100 --seed 4 --out ";
  auto r = Cli(pack_cmd + Q(dir.file("p1")));
  ASSERT_EQ(r.code, 0) << r.output;
  ASSERT_EQ(Cli(pack_cmd + Q(dir.file("p2"))).code, 0);
  EXPECT_EQ(ReadText(dir.file("p1/package.json")), ReadText(dir.file("p2/package.json")));

  const auto package = read_package(dir.file("p1/package.json"));
  ASSERT_EQ(package.items.size(), 100u);
  EvalResponse response{package.package_id, {}};
  for (std::size_t k = 0; k < package.items.size(); ++k) {
    const auto& item = package.items[k];
    const std::int32_t pick = k < 61 ? item.tid_option_index : (item.tid_option_index + 1) % 4;
    response.entries.push_back({item.record_id, {pick}});
  }
  std::ostringstream csv;
  write_response_csv(csv, response);
  WriteText(dir.file("responses.csv"), csv.str());
  r = Cli("humaneval score --package " + Q(dir.file("p1/package.json")) + " --responses " +
          Q(dir.file("responses.csv")) + " --out " + Q(dir.file("s")));
  ASSERT_EQ(r.code, 0) << r.output;
  const auto agreement = Csv(dir.file("s/agreement.csv"));
  const auto& overall = agreement.rows.back();
  EXPECT_EQ(overall[0], "overall");
  EXPECT_EQ(overall[3], "100");
  EXPECT_EQ(overall[4], "61");
  EXPECT_EQ(std::stod(overall[5]), 0.61);

  // Index out of range is a validation failure.
  WriteText(dir.file("bad.csv"), "package_id,record_id,selected_indices\n" + package.package_id +
                                     "," + package.items[0].record_id + ",4\n");
  EXPECT_EQ(Cli("humaneval score --package " + Q(dir.file("p1/package.json")) + " --responses " +
                Q(dir.file("bad.csv")) + " --out " + Q(dir.file("s2")))
                .code,
            1);
  // Too many items requested.
  EXPECT_EQ(Cli(pack_cmd.substr(0, pack_cmd.find("--count")) + "--count 100000 --out " +
                Q(dir.file("p3")))
                .code,
            1);
}

}  // namespace
}  // namespace texbias
