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

// texbias command line. Links only the C API.

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "texbias/texbias.h"

namespace {

struct Flags {
  std::string registry, texture_records, val_records, adv_records, tav, val_assignments,
      adv_assignments, out, entropy = "normalized";
  std::string assignments, image_refs, package, responses, package_id;
  int64_t bins = 10, top_k = 50, seed = 0, workers = 1, count = 200;
  int64_t textures = 8, objects = 8, samples_per_texture = 100, images_per_object = 25;
  double noise = 0.05, adv_noise = 0.3;
};

int ExitCode(tb_status status) {
  switch (status) {
    case TB_OK: return 0;
    case TB_ERR_VALIDATION: return 1;
    case TB_ERR_MISSING_INPUT: return 2;
    case TB_ERR_INTERNAL: return 3;
    case TB_ERR_INVALID_ARGUMENT: return 1;
  }
  return 3;
}

class Config {
 public:
  Config() : config_(tb_config_create()) {}
  ~Config() { tb_config_free(config_); }
  Config(const Config&) = delete;
  Config& operator=(const Config&) = delete;

  tb_config* get() const { return config_; }

  tb_status Apply(const Flags& f) {
    const std::pair<const char*, const std::string*> strings[] = {
        {"registry", &f.registry},
        {"texture-records", &f.texture_records},
        {"val-records", &f.val_records},
        {"adv-records", &f.adv_records},
        {"tav", &f.tav},
        {"val-assignments", &f.val_assignments},
        {"adv-assignments", &f.adv_assignments},
        {"out", &f.out},
        {"entropy", &f.entropy},
        {"assignments", &f.assignments},
        {"image-refs", &f.image_refs},
        {"package", &f.package},
        {"responses", &f.responses},
        {"package-id", &f.package_id},
    };
    for (const auto& [key, value] : strings) {
      if (const tb_status s = tb_config_set_string(config_, key, value->c_str()); s != TB_OK) {
        return s;
      }
    }
    const std::pair<const char*, int64_t> ints[] = {
        {"bins", f.bins},
        {"top-k", f.top_k},
        {"seed", f.seed},
        {"workers", f.workers},
        {"count", f.count},
        {"textures", f.textures},
        {"objects", f.objects},
        {"samples-per-texture", f.samples_per_texture},
        {"images-per-object", f.images_per_object},
    };
    for (const auto& [key, value] : ints) {
      if (const tb_status s = tb_config_set_int(config_, key, value); s != TB_OK) return s;
    }
    if (const tb_status s = tb_config_set_real(config_, "noise", f.noise); s != TB_OK) return s;
    return tb_config_set_real(config_, "adv-noise", f.adv_noise);
  }

 private:
  tb_config* config_;
};

void AddInputFlags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--registry", f.registry, "Class registry JSON");
  cmd->add_option("--texture-records", f.texture_records, "Texture-probe JSONL");
  cmd->add_option("--val-records", f.val_records, "Validation image-probe JSONL");
  cmd->add_option("--adv-records", f.adv_records, "Adversarial image-probe JSONL");
  cmd->add_option("--tav", f.tav, "Precomputed tav.csv");
  cmd->add_option("--val-assignments", f.val_assignments, "Precomputed validation assignments.csv");
  cmd->add_option("--adv-assignments", f.adv_assignments, "Precomputed adversarial assignments.csv");
  cmd->add_option("--entropy", f.entropy, "Entropy mode")
      ->check(CLI::IsMember({"normalized", "raw"}));
  cmd->add_option("--workers", f.workers, "Worker threads")->check(CLI::Range(1, 1024));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"texbias: texture association and texture identification analytics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tb_version());
  Flags f;

  auto* validate = app.add_subcommand("validate", "Validate registry, record and artifact files");
  AddInputFlags(validate, f);

  auto* tav = app.add_subcommand("tav", "Build tav.csv, top_pairs.csv and confidence_hist.csv");
  AddInputFlags(tav, f);
  tav->add_option("--out", f.out, "Output directory")->required();
  tav->add_option("--bins", f.bins, "Confidence histogram bins")->check(CLI::Range(1, 1000000));
  tav->add_option("--top-k", f.top_k, "Number of top TAV pairs")->check(CLI::NonNegativeNumber);
  tav->add_option("--seed", f.seed, "Accepted for a uniform flag set; this stage is deterministic");

  auto* analyze = app.add_subcommand("analyze", "Assign textures and run every bias analysis");
  AddInputFlags(analyze, f);
  analyze->add_option("--out", f.out, "Output directory")->required();
  analyze->add_option("--seed", f.seed, "Accepted for a uniform flag set; this stage is deterministic");

  auto* humaneval = app.add_subcommand("humaneval", "Human evaluation packages and scoring");
  humaneval->require_subcommand(1);
  auto* pack = humaneval->add_subcommand("pack", "Sample items into a package.json");
  pack->add_option("--registry", f.registry, "Class registry JSON")->required();
  pack->add_option("--assignments", f.assignments, "assignments.csv to sample from")->required();
  pack->add_option("--image-refs", f.image_refs, "CSV record_id,image_ref");
  pack->add_option("--count", f.count, "Items in the package")->check(CLI::NonNegativeNumber);
  pack->add_option("--seed", f.seed, "Sampling seed")->check(CLI::NonNegativeNumber);
  pack->add_option("--package-id", f.package_id, "Package identifier");
  pack->add_option("--out", f.out, "Output directory")->required();
  auto* score = humaneval->add_subcommand("score", "Score a response CSV against a package");
  score->add_option("--package", f.package, "package.json")->required();
  score->add_option("--responses", f.responses, "Response CSV")->required();
  score->add_option("--out", f.out, "Output directory")->required();

  auto* synth = app.add_subcommand("synth", "Write a planted synthetic fixture");
  synth->add_option("--out", f.out, "Output directory")->required();
  synth->add_option("--textures", f.textures, "Texture classes")->check(CLI::Range(2, 100000));
  synth->add_option("--objects", f.objects, "Object classes")->check(CLI::Range(2, 100000));
  synth->add_option("--noise", f.noise, "Noise in [0,1)");
  synth->add_option("--adv-noise", f.adv_noise, "Noise of the adversarial image set");
  synth->add_option("--samples-per-texture", f.samples_per_texture)->check(CLI::NonNegativeNumber);
  synth->add_option("--images-per-object", f.images_per_object)->check(CLI::NonNegativeNumber);
  synth->add_option("--seed", f.seed, "Generator seed")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  Config config;
  if (config.get() == nullptr) {
    std::fprintf(stderr, "error: out of memory\n");
    return 3;
  }
  if (const tb_status s = config.Apply(f); s != TB_OK) {
    std::fprintf(stderr, "error: %s\n", tb_last_error());
    return ExitCode(s);
  }

  tb_status status = TB_OK;
  if (*validate) status = tb_run_validate(config.get());
  else if (*tav) status = tb_run_tav(config.get());
  else if (*analyze) status = tb_run_analyze(config.get());
  else if (*pack) status = tb_run_humaneval_pack(config.get());
  else if (*score) status = tb_run_humaneval_score(config.get());
  else if (*synth) status = tb_run_synth(config.get());

  if (status != TB_OK) {
    // validate already printed one line per problem.
    if (!*validate) std::fprintf(stderr, "error: %s\n", tb_last_error());
    return ExitCode(status);
  }
  return 0;
}
