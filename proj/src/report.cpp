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

#include "texbias/report.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"
#include "texbias/analysis.hpp"
#include "texbias/csv.hpp"
#include "texbias/error.hpp"
#include "texbias/humaneval.hpp"
#include "texbias/records.hpp"
#include "texbias/synth.hpp"
#include "texbias/tid.hpp"

namespace texbias {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

constexpr std::size_t kImageChunk = 4096;

void Log(const RunConfig& config, const std::string& line) {
  if (config.log) config.log(line);
}

std::string Require(const std::string& value, const char* flag) {
  if (value.empty()) throw MissingInputError(fmt::format("missing required input --{}", flag));
  return value;
}

void RequireFile(const std::string& path, const char* flag) {
  Require(path, flag);
  if (!fs::exists(path)) throw MissingInputError(fmt::format("--{}: no such file {}", flag, path));
}

fs::path OutputDir(const RunConfig& config) {
  const fs::path dir = Require(config.out, "out");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorCode::kInternal, fmt::format("cannot create output directory {}", dir.string()));
  }
  return dir;
}

// Writes via a stream callback; the file appears only after a complete write.
template <typename Fn>
void WriteFile(const fs::path& path, Fn&& fn) {
  const fs::path tmp = path.string() + ".partial";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error(ErrorCode::kInternal, "cannot write " + tmp.string());
    fn(out);
    out.flush();
    if (!out) throw Error(ErrorCode::kInternal, "write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

ordered_json Summary(double value) {
  return std::stod(format_real(value, kSummaryDigits));
}

ordered_json Summary(const std::optional<double>& value) {
  return value ? Summary(*value) : ordered_json(nullptr);
}

TavMatrix LoadOrBuildTav(const RunConfig& config, const ClassRegistry& registry) {
  if (!config.tav.empty()) {
    RequireFile(config.tav, "tav");
    return read_tav_csv(config.tav, registry);
  }
  if (config.texture_records.empty()) {
    throw MissingInputError("analysis needs --tav or --texture-records");
  }
  RequireFile(config.texture_records, "texture-records");
  const auto records = read_texture_records(config.texture_records, registry);
  return tav(count_matrix(records, registry, config.workers), config.entropy);
}

// Streams image records in fixed-size chunks through the TID index, writing
// each assignment as it is produced.
std::vector<TidAssignment> AssignImages(const std::string& path, const ClassRegistry& registry,
                                        const TidIndex& index, unsigned workers,
                                        AssignmentCsvWriter& writer) {
  ImageRecordReader reader(path, registry);
  std::vector<TidAssignment> all;
  std::vector<ImageProbeRecord> chunk;
  chunk.reserve(kImageChunk);
  auto flush = [&] {
    for (auto& a : batch_assign(chunk, index, workers)) {
      writer.write(a);
      all.push_back(std::move(a));
    }
    chunk.clear();
  };
  while (auto record = reader.next()) {
    chunk.push_back(std::move(*record));
    if (chunk.size() == kImageChunk) flush();
  }
  flush();
  return all;
}

std::vector<TidAssignment> LoadAssignments(const RunConfig& config, const ClassRegistry& registry,
                                           const TavMatrix* tav, const std::string& records,
                                           const char* records_flag,
                                           const std::string& assignments,
                                           const char* assignments_flag,
                                           const fs::path& out_path) {
  std::vector<TidAssignment> result;
  if (!assignments.empty()) {
    RequireFile(assignments, assignments_flag);
    result = read_assignments_csv(assignments, registry);
    WriteFile(out_path, [&](std::ostream& out) { write_assignments_csv(out, result, registry); });
    return result;
  }
  RequireFile(records, records_flag);
  const TidIndex index(*tav);
  WriteFile(out_path, [&](std::ostream& out) {
    AssignmentCsvWriter writer(out, registry);
    result = AssignImages(records, registry, index, config.workers, writer);
  });
  return result;
}

std::vector<TidAssignment> Labeled(const std::vector<TidAssignment>& all) {
  std::vector<TidAssignment> out;
  out.reserve(all.size());
  for (const auto& a : all) {
    if (a.true_label_id) out.push_back(a);
  }
  return out;
}

const std::string& ClassName(const ClassRegistry& registry, std::int32_t id) {
  return registry.object_name(static_cast<std::size_t>(id));
}

const std::string& TextureName(const ClassRegistry& registry, std::int32_t id) {
  return registry.texture_name(static_cast<std::size_t>(id));
}

struct ModeResult {
  GroupMode mode;
  std::vector<AnalysisGroup> groups;
  DominantTextureMap dominant;
  DominanceSplit split;
  std::optional<double> correlation;
  std::optional<double> avg_textures;
  std::size_t class_count = 0;
};

ModeResult AnalyzeMode(std::span<const TidAssignment> assignments, GroupMode mode) {
  ModeResult r{mode, group_by(assignments, mode), {}, {}, {}, {}, 0};
  r.dominant = dominant_textures(r.groups);
  r.split = dominance_split(assignments, r.dominant, mode);
  r.class_count = r.dominant.size();
  if (r.groups.size() >= 2) r.correlation = ratio_metric_correlation(r.groups);
  if (!r.groups.empty()) r.avg_textures = avg_textures_per_class(r.groups);
  return r;
}

ordered_json SplitJson(const DominanceSplit& s) {
  ordered_json j;
  j["dominant_mean"] = Summary(s.dominant_mean);
  j["nondominant_mean"] = Summary(s.nondominant_mean);
  j["overall_mean"] = Summary(s.overall_mean);
  j["dominant_count"] = s.dominant_count;
  j["nondominant_count"] = s.nondominant_count;
  return j;
}

// Validation of one JSONL file, including its manifest sidecar when present.
template <typename Reader>
void ValidateRecords(const std::string& path, const ClassRegistry& registry, DatasetKind kind) {
  Reader reader(path, registry);
  std::int64_t count = 0;
  while (reader.next()) ++count;
  const std::string manifest_path = manifest_path_for(path);
  if (!fs::exists(manifest_path)) return;
  const DatasetManifest manifest = read_manifest(manifest_path);
  if (manifest.kind != kind) {
    throw ValidationError(manifest_path, 0,
                          fmt::format("manifest kind {} but file holds {} records",
                                      to_string(manifest.kind), to_string(kind)));
  }
  if (manifest.record_count != count) {
    throw ValidationError(manifest_path, 0,
                          fmt::format("manifest record_count {} but file has {} records",
                                      manifest.record_count, count));
  }
  if (manifest.registry_hash != registry.hash()) {
    throw ValidationError(manifest_path, 0, "manifest registry_hash does not match the registry");
  }
}

}  // namespace

int run_validate(const RunConfig& config) {
  int status = 0;
  auto fail = [&](const Error& e) {
    Log(config, fmt::format("error: {}", e.what()));
    status = std::max(status, static_cast<int>(e.code() == ErrorCode::kMissingInput ? 2 : 1));
  };

  std::optional<ClassRegistry> registry;
  try {
    RequireFile(config.registry, "registry");
    registry = load_registry(config.registry);
  } catch (const Error& e) {
    fail(e);
    return status;
  }

  auto check = [&](const std::string& path, const char* flag, auto&& fn) {
    if (path.empty()) return;
    try {
      RequireFile(path, flag);
      fn(path);
      Log(config, fmt::format("ok: {}", path));
    } catch (const Error& e) {
      fail(e);
    }
  };
  check(config.texture_records, "texture-records", [&](const std::string& p) {
    ValidateRecords<TextureRecordReader>(p, *registry, DatasetKind::kTextureProbe);
  });
  check(config.val_records, "val-records", [&](const std::string& p) {
    ValidateRecords<ImageRecordReader>(p, *registry, DatasetKind::kImageProbe);
  });
  check(config.adv_records, "adv-records", [&](const std::string& p) {
    ValidateRecords<ImageRecordReader>(p, *registry, DatasetKind::kImageProbe);
  });
  check(config.tav, "tav", [&](const std::string& p) { read_tav_csv(p, *registry); });
  check(config.val_assignments, "val-assignments",
        [&](const std::string& p) { read_assignments_csv(p, *registry); });
  check(config.adv_assignments, "adv-assignments",
        [&](const std::string& p) { read_assignments_csv(p, *registry); });
  return status;
}

void run_tav(const RunConfig& config) {
  RequireFile(config.registry, "registry");
  RequireFile(config.texture_records, "texture-records");
  const ClassRegistry registry = load_registry(config.registry);
  const fs::path dir = OutputDir(config);

  const auto records = read_texture_records(config.texture_records, registry);
  const CountMatrix counts = count_matrix(records, registry, config.workers);
  const TavMatrix matrix = tav(counts, config.entropy);

  const std::size_t cells = matrix.rows() * matrix.cols();
  std::size_t k = config.top_k;
  if (k > cells) {
    Log(config, fmt::format("notice: --top-k {} exceeds the {} TAV cells; writing all {}", k,
                            cells, cells));
    k = cells;
  }
  const auto pairs = top_pairs(matrix, k);
  const ConfidenceHistogram histogram = confidence_histogram(records, config.bins);

  WriteFile(dir / "tav.csv", [&](std::ostream& out) { write_tav_csv(out, matrix, registry); });
  WriteFile(dir / "top_pairs.csv",
            [&](std::ostream& out) { write_top_pairs_csv(out, pairs, registry); });
  WriteFile(dir / "confidence_hist.csv",
            [&](std::ostream& out) { write_histogram_csv(out, histogram); });
  Log(config, fmt::format("tav: {} records, {}x{} matrix -> {}", records.size(), matrix.rows(),
                          matrix.cols(), dir.string()));
}

void run_analyze(const RunConfig& config) {
  RequireFile(config.registry, "registry");
  const ClassRegistry registry = load_registry(config.registry);
  const fs::path dir = OutputDir(config);

  const bool need_tav = config.val_assignments.empty() ||
                        (config.adv_assignments.empty() && !config.adv_records.empty());
  std::optional<TavMatrix> matrix;
  if (need_tav) matrix = LoadOrBuildTav(config, registry);
  if (config.val_assignments.empty() && config.val_records.empty()) {
    throw MissingInputError("analysis needs --val-records or --val-assignments");
  }

  const auto validation =
      LoadAssignments(config, registry, matrix ? &*matrix : nullptr, config.val_records,
                      "val-records", config.val_assignments, "val-assignments",
                      dir / "assignments.csv");
  const auto labeled = Labeled(validation);
  if (labeled.size() != validation.size()) {
    Log(config, fmt::format("notice: {} unlabeled validation records excluded from label-mode "
                            "analyses",
                            validation.size() - labeled.size()));
  }

  const ModeResult label_mode = AnalyzeMode(labeled, GroupMode::kLabel);
  const ModeResult pred_mode = AnalyzeMode(validation, GroupMode::kPrediction);
  const ModeResult* modes[] = {&label_mode, &pred_mode};

  WriteFile(dir / "groups.csv", [&](std::ostream& out) {
    CsvWriter csv(out);
    csv.row({"mode", "class_id", "class_name", "texture_id", "texture_name", "count", "ratio",
             "metric"});
    for (const ModeResult* m : modes) {
      for (const auto& g : m->groups) {
        csv.row({to_string(m->mode), std::to_string(g.class_id), ClassName(registry, g.class_id),
                 std::to_string(g.texture_id), TextureName(registry, g.texture_id),
                 std::to_string(g.sample_count), format_real(g.count_ratio),
                 format_real(g.mean_metric)});
      }
    }
  });
  WriteFile(dir / "dominant_textures.csv", [&](std::ostream& out) {
    CsvWriter csv(out);
    csv.row({"mode", "class_id", "class_name", "texture_id", "texture_name", "count", "tie"});
    for (const ModeResult* m : modes) {
      for (const auto& [cls, d] : m->dominant) {
        csv.row({to_string(m->mode), std::to_string(cls), ClassName(registry, cls),
                 std::to_string(d.texture_id), TextureName(registry, d.texture_id),
                 std::to_string(d.sample_count), d.tie ? "true" : "false"});
      }
    }
  });
  WriteFile(dir / "dominance.csv", [&](std::ostream& out) {
    CsvWriter csv(out);
    csv.row({"mode", "dominant_mean", "nondominant_mean", "overall_mean", "dominant_count",
             "nondominant_count"});
    for (const ModeResult* m : modes) {
      csv.row({to_string(m->mode), format_optional_real(m->split.dominant_mean),
               format_optional_real(m->split.nondominant_mean),
               format_optional_real(m->split.overall_mean),
               std::to_string(m->split.dominant_count),
               std::to_string(m->split.nondominant_count)});
    }
  });
  WriteFile(dir / "correlations.csv", [&](std::ostream& out) {
    CsvWriter csv(out);
    csv.row({"mode", "pearson_r", "avg_textures", "group_count", "class_count"});
    for (const ModeResult* m : modes) {
      csv.row({to_string(m->mode), format_optional_real(m->correlation),
               format_optional_real(m->avg_textures), std::to_string(m->groups.size()),
               std::to_string(m->class_count)});
    }
  });

  ordered_json summary;
  summary["validation_records"] = validation.size();
  summary["entropy"] = to_string(config.entropy);
  for (const ModeResult* m : modes) {
    ordered_json j;
    j["correlation"] = Summary(m->correlation);
    j["avg_textures"] = Summary(m->avg_textures);
    j["dominance"] = SplitJson(m->split);
    summary[to_string(m->mode)] = std::move(j);
  }

  const bool have_adv = !config.adv_records.empty() || !config.adv_assignments.empty();
  if (!have_adv) {
    Log(config, "notice: no adversarial input; alignment, per-label agreement and magnitude "
                "outputs skipped");
    summary["adversarial"] = nullptr;
  } else {
    const auto adversarial =
        LoadAssignments(config, registry, matrix ? &*matrix : nullptr, config.adv_records,
                        "adv-records", config.adv_assignments, "adv-assignments",
                        dir / "adv_assignments.csv");
    if (Labeled(adversarial).size() != adversarial.size()) {
      throw ValidationError(config.adv_records.empty() ? config.adv_assignments
                                                       : config.adv_records,
                            0, "adversarial records must all carry true_label_id");
    }
    const AlignmentReport alignment =
        alignment_categories(adversarial, label_mode.dominant, pred_mode.dominant);
    const auto agreement =
        per_label_agreement(adversarial, label_mode.dominant, pred_mode.dominant);

    WriteFile(dir / "alignment.csv", [&](std::ostream& out) {
      CsvWriter csv(out);
      csv.row({"both_ratio", "pred_only_ratio", "label_only_ratio", "neither_ratio",
               "sample_count", "uncovered_count"});
      const bool any = alignment.sample_count() > 0;
      auto ratio = [&](double r) { return any ? format_real(r) : std::string(); };
      csv.row({ratio(alignment.both_ratio()), ratio(alignment.prediction_only_ratio()),
               ratio(alignment.label_only_ratio()), ratio(alignment.neither_ratio()),
               std::to_string(alignment.sample_count()), std::to_string(alignment.uncovered)});
    });
    WriteFile(dir / "per_label_agreement.csv", [&](std::ostream& out) {
      CsvWriter csv(out);
      csv.row({"label_id", "label_name", "pred_agree_rate", "label_agree_rate", "sample_count"});
      for (const auto& a : agreement) {
        csv.row({std::to_string(a.label_id), ClassName(registry, a.label_id),
                 format_real(a.prediction_agree_rate), format_real(a.label_agree_rate),
                 std::to_string(a.sample_count)});
      }
    });

    std::optional<std::pair<double, double>> magnitude;
    if (!validation.empty() && !adversarial.empty()) {
      magnitude = magnitude_comparison(validation, adversarial);
    }
    WriteFile(dir / "magnitude.csv", [&](std::ostream& out) {
      CsvWriter csv(out);
      csv.row({"set", "mean_similarity", "count"});
      csv.row({"validation", magnitude ? format_real(magnitude->first) : "",
               std::to_string(validation.size())});
      csv.row({"adversarial", magnitude ? format_real(magnitude->second) : "",
               std::to_string(adversarial.size())});
    });

    ordered_json adv;
    adv["records"] = adversarial.size();
    const bool any = alignment.sample_count() > 0;
    adv["both_ratio"] = any ? Summary(alignment.both_ratio()) : nullptr;
    adv["pred_only_ratio"] = any ? Summary(alignment.prediction_only_ratio()) : nullptr;
    adv["label_only_ratio"] = any ? Summary(alignment.label_only_ratio()) : nullptr;
    adv["neither_ratio"] = any ? Summary(alignment.neither_ratio()) : nullptr;
    adv["uncovered"] = alignment.uncovered;
    adv["mean_magnitude_validation"] =
        magnitude ? Summary(magnitude->first) : ordered_json(nullptr);
    adv["mean_magnitude_adversarial"] =
        magnitude ? Summary(magnitude->second) : ordered_json(nullptr);
    summary["adversarial"] = std::move(adv);
  }

  WriteFile(dir / "summary.json",
            [&](std::ostream& out) { out << summary.dump(2) << '\n'; });
  Log(config, fmt::format("analyze: {} validation assignments -> {}", validation.size(),
                          dir.string()));
}

void run_humaneval_pack(const RunConfig& config) {
  RequireFile(config.registry, "registry");
  RequireFile(config.assignments, "assignments");
  const ClassRegistry registry = load_registry(config.registry);
  const auto assignments = read_assignments_csv(config.assignments, registry);
  std::map<std::string, std::string> refs;
  if (!config.image_refs.empty()) {
    RequireFile(config.image_refs, "image-refs");
    refs = read_image_refs(config.image_refs);
  }
  const fs::path dir = OutputDir(config);
  const EvalPackage package =
      pack(assignments, refs, config.count, config.seed, registry, config.package_id);
  WriteFile(dir / "package.json", [&](std::ostream& out) { out << package_to_json(package); });
  Log(config, fmt::format("humaneval pack: {} items, package_id {} -> {}", package.items.size(),
                          package.package_id, (dir / "package.json").string()));
}

void run_humaneval_score(const RunConfig& config) {
  RequireFile(config.package, "package");
  RequireFile(config.responses, "responses");
  const EvalPackage package = read_package(config.package);
  const EvalResponse response = read_response_csv(config.responses);
  AgreementScore result;
  try {
    result = score(package, response);
  } catch (const ValidationError& e) {
    throw ValidationError(config.responses, 0, e.detail());
  }
  const fs::path dir = OutputDir(config);
  WriteFile(dir / "agreement.csv", [&](std::ostream& out) { write_agreement_csv(out, result); });
  Log(config, fmt::format("humaneval score: {} of {} answered items agree (overall {})",
                          result.agreed, result.answered,
                          format_optional_real(result.overall(), kSummaryDigits)));
}

void run_synth(const RunConfig& config) {
  const fs::path dir = OutputDir(config);
  PlantedWorld world =
      make_planted_world(config.textures, config.objects, config.noise,
                         config.samples_per_texture, config.images_per_object, config.seed);
  const ClassRegistry registry = planted_registry(world);
  const std::string hash = registry.hash();
  write_registry((dir / "registry.json").string(), registry);

  ordered_json extra;
  extra["generator"] = "texbias synth";
  extra["planted_mapping"] = world.mapping;
  extra["noise"] = world.noise;

  auto manifest = [&](const fs::path& path, std::size_t count, DatasetKind kind,
                      const std::string& dataset_id, std::uint64_t seed, double noise) {
    DatasetManifest m;
    m.dataset_id = dataset_id;
    m.record_count = static_cast<std::int64_t>(count);
    m.registry_hash = hash;
    m.kind = kind;
    m.seed = seed;
    extra["noise"] = noise;
    m.extra_json = extra.dump();
    write_manifest(manifest_path_for(path.string()), m);
  };

  const auto texture = gen_texture_records(world);
  write_texture_records((dir / "texture_records.jsonl").string(), texture);
  manifest(dir / "texture_records.jsonl", texture.size(), DatasetKind::kTextureProbe,
           "synthetic-textures", world.seed, world.noise);

  world.dataset_id = "synthetic-val";
  const auto val = gen_image_records(world);
  write_image_records((dir / "val_records.jsonl").string(), val);
  manifest(dir / "val_records.jsonl", val.size(), DatasetKind::kImageProbe, world.dataset_id,
           world.seed, world.noise);

  PlantedWorld adv_world = world;
  adv_world.seed = world.seed + 1;
  adv_world.noise = config.adv_noise;
  adv_world.dataset_id = "synthetic-adv";
  const auto adv = gen_image_records(adv_world);
  write_image_records((dir / "adv_records.jsonl").string(), adv);
  manifest(dir / "adv_records.jsonl", adv.size(), DatasetKind::kImageProbe, adv_world.dataset_id,
           adv_world.seed, adv_world.noise);

  Log(config, fmt::format("synth: {} textures x {} objects, {} texture / {} val / {} adv "
                          "records -> {}",
                          world.textures, world.objects, texture.size(), val.size(), adv.size(),
                          dir.string()));
}

}  // namespace texbias
