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

#include "texbias/texbias.h"

#include <cstdio>
#include <exception>
#include <new>
#include <string>
#include <string_view>

#include "texbias/error.hpp"
#include "texbias/registry.hpp"
#include "texbias/report.hpp"
#include "texbias/tav.hpp"
#include "texbias/tid.hpp"

struct tb_registry {
  texbias::ClassRegistry registry;
  std::string hash;
};

struct tb_tav {
  texbias::TavMatrix matrix;
};

struct tb_config {
  texbias::RunConfig config;
};

namespace {

thread_local std::string g_last_error;

tb_status Fail(tb_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs `fn`, translating exceptions into status codes.
template <typename Fn>
tb_status Guard(Fn&& fn) {
  try {
    return fn();
  } catch (const texbias::Error& e) {
    return Fail(static_cast<tb_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return Fail(TB_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(TB_ERR_INTERNAL, e.what());
  } catch (...) {
    return Fail(TB_ERR_INTERNAL, "unknown error");
  }
}

tb_status NullArgument(const char* name) {
  return Fail(TB_ERR_INVALID_ARGUMENT, std::string(name) + " is NULL");
}

void StderrLog(std::string_view line) {
  std::fprintf(stderr, "%.*s\n", static_cast<int>(line.size()), line.data());
}

}  // namespace

extern "C" {

const char* tb_version(void) { return "0.3.0"; }

const char* tb_last_error(void) { return g_last_error.c_str(); }

const char* tb_status_name(tb_status status) {
  switch (status) {
    case TB_OK: return "ok";
    case TB_ERR_VALIDATION: return "validation failure";
    case TB_ERR_MISSING_INPUT: return "missing input";
    case TB_ERR_INTERNAL: return "internal error";
    case TB_ERR_INVALID_ARGUMENT: return "invalid argument";
  }
  return "unknown status";
}

tb_status tb_registry_load(const char* path, tb_registry** out) {
  if (path == nullptr) return NullArgument("path");
  if (out == nullptr) return NullArgument("out");
  *out = nullptr;
  return Guard([&] {
    auto registry = texbias::load_registry(path);
    std::string hash = registry.hash();
    *out = new tb_registry{std::move(registry), std::move(hash)};
    return TB_OK;
  });
}

void tb_registry_free(tb_registry* registry) { delete registry; }

size_t tb_registry_texture_count(const tb_registry* registry) {
  return registry ? registry->registry.texture_count() : 0;
}

size_t tb_registry_object_count(const tb_registry* registry) {
  return registry ? registry->registry.object_count() : 0;
}

const char* tb_registry_texture_name(const tb_registry* registry, size_t id) {
  if (registry == nullptr || id >= registry->registry.texture_count()) return nullptr;
  return registry->registry.texture_name(id).c_str();
}

const char* tb_registry_object_name(const tb_registry* registry, size_t id) {
  if (registry == nullptr || id >= registry->registry.object_count()) return nullptr;
  return registry->registry.object_name(id).c_str();
}

const char* tb_registry_hash(const tb_registry* registry) {
  return registry ? registry->hash.c_str() : nullptr;
}

tb_status tb_tav_from_counts(const int64_t* counts, size_t textures, size_t objects,
                             tb_entropy_mode mode, tb_tav** out) {
  if (out == nullptr) return NullArgument("out");
  *out = nullptr;
  if (counts == nullptr && textures * objects > 0) return NullArgument("counts");
  return Guard([&] {
    texbias::CountMatrix matrix(textures, objects);
    for (size_t i = 0; i < textures; ++i) {
      for (size_t j = 0; j < objects; ++j) {
        const int64_t c = counts[i * objects + j];
        if (c < 0) return Fail(TB_ERR_INVALID_ARGUMENT, "negative count");
        matrix.add(i, j, c);
      }
    }
    const auto m = mode == TB_ENTROPY_RAW ? texbias::EntropyMode::kRawNatural
                                          : texbias::EntropyMode::kNormalized;
    *out = new tb_tav{texbias::tav(matrix, m)};
    return TB_OK;
  });
}

tb_status tb_tav_from_texture_records(const tb_registry* registry, const char* path,
                                      tb_entropy_mode mode, unsigned workers, tb_tav** out) {
  if (registry == nullptr) return NullArgument("registry");
  if (path == nullptr) return NullArgument("path");
  if (out == nullptr) return NullArgument("out");
  *out = nullptr;
  return Guard([&] {
    const auto records = texbias::read_texture_records(path, registry->registry);
    const auto counts = texbias::count_matrix(records, registry->registry, workers);
    const auto m = mode == TB_ENTROPY_RAW ? texbias::EntropyMode::kRawNatural
                                          : texbias::EntropyMode::kNormalized;
    *out = new tb_tav{texbias::tav(counts, m)};
    return TB_OK;
  });
}

void tb_tav_free(tb_tav* tav) { delete tav; }

size_t tb_tav_texture_count(const tb_tav* tav) { return tav ? tav->matrix.rows() : 0; }

size_t tb_tav_object_count(const tb_tav* tav) { return tav ? tav->matrix.cols() : 0; }

tb_status tb_tav_value(const tb_tav* tav, size_t texture, size_t object, double* out) {
  if (tav == nullptr) return NullArgument("tav");
  if (out == nullptr) return NullArgument("out");
  if (texture >= tav->matrix.rows() || object >= tav->matrix.cols()) {
    return Fail(TB_ERR_INVALID_ARGUMENT, "TAV index out of range");
  }
  *out = tav->matrix.at(texture, object);
  return TB_OK;
}

tb_status tb_tid_assign(const tb_tav* tav, const double* probs, size_t length,
                        int32_t* texture_id, double* similarity) {
  if (tav == nullptr) return NullArgument("tav");
  if (probs == nullptr && length > 0) return NullArgument("probs");
  return Guard([&] {
    const auto match = texbias::tid_assign({probs, length}, tav->matrix);
    if (texture_id) *texture_id = match.texture_id;
    if (similarity) *similarity = match.similarity;
    return TB_OK;
  });
}

tb_config* tb_config_create(void) {
  auto* config = new (std::nothrow) tb_config{};
  if (config) config->config.log = StderrLog;
  return config;
}

void tb_config_free(tb_config* config) { delete config; }

tb_status tb_config_set_string(tb_config* config, const char* key, const char* value) {
  if (config == nullptr) return NullArgument("config");
  if (key == nullptr) return NullArgument("key");
  if (value == nullptr) return NullArgument("value");
  return Guard([&] {
    auto& c = config->config;
    const std::string_view k = key;
    if (k == "registry") c.registry = value;
    else if (k == "texture-records") c.texture_records = value;
    else if (k == "val-records") c.val_records = value;
    else if (k == "adv-records") c.adv_records = value;
    else if (k == "tav") c.tav = value;
    else if (k == "val-assignments") c.val_assignments = value;
    else if (k == "adv-assignments") c.adv_assignments = value;
    else if (k == "out") c.out = value;
    else if (k == "entropy") c.entropy = texbias::entropy_mode_from_string(value);
    else if (k == "assignments") c.assignments = value;
    else if (k == "image-refs") c.image_refs = value;
    else if (k == "package") c.package = value;
    else if (k == "responses") c.responses = value;
    else if (k == "package-id") c.package_id = value;
    else return Fail(TB_ERR_INVALID_ARGUMENT, "unknown string key '" + std::string(k) + "'");
    return TB_OK;
  });
}

tb_status tb_config_set_int(tb_config* config, const char* key, int64_t value) {
  if (config == nullptr) return NullArgument("config");
  if (key == nullptr) return NullArgument("key");
  auto& c = config->config;
  const std::string_view k = key;
  if (value < 0) return Fail(TB_ERR_INVALID_ARGUMENT, "'" + std::string(k) + "' must be >= 0");
  const auto v = static_cast<uint64_t>(value);
  if (k == "bins") {
    if (v == 0) return Fail(TB_ERR_INVALID_ARGUMENT, "bins must be >= 1");
    c.bins = v;
  } else if (k == "top-k") {
    c.top_k = v;
  } else if (k == "seed") {
    c.seed = v;
  } else if (k == "workers") {
    if (v == 0 || v > 1024) return Fail(TB_ERR_INVALID_ARGUMENT, "workers must be in [1,1024]");
    c.workers = static_cast<unsigned>(v);
  } else if (k == "count") {
    c.count = v;
  } else if (k == "textures") {
    c.textures = v;
  } else if (k == "objects") {
    c.objects = v;
  } else if (k == "samples-per-texture") {
    c.samples_per_texture = v;
  } else if (k == "images-per-object") {
    c.images_per_object = v;
  } else {
    return Fail(TB_ERR_INVALID_ARGUMENT, "unknown integer key '" + std::string(k) + "'");
  }
  return TB_OK;
}

tb_status tb_config_set_real(tb_config* config, const char* key, double value) {
  if (config == nullptr) return NullArgument("config");
  if (key == nullptr) return NullArgument("key");
  const std::string_view k = key;
  if (k == "noise") {
    config->config.noise = value;
  } else if (k == "adv-noise") {
    config->config.adv_noise = value;
  } else {
    return Fail(TB_ERR_INVALID_ARGUMENT, "unknown real key '" + std::string(k) + "'");
  }
  return TB_OK;
}

void tb_config_set_log(tb_config* config, tb_log_fn fn, void* user_data) {
  if (config == nullptr) return;
  if (fn == nullptr) {
    config->config.log = nullptr;
    return;
  }
  config->config.log = [fn, user_data](std::string_view line) {
    const std::string text(line);
    fn(user_data, text.c_str());
  };
}

tb_status tb_run_validate(const tb_config* config) {
  if (config == nullptr) return NullArgument("config");
  return Guard([&] {
    const int status = texbias::run_validate(config->config);
    if (status != 0) return Fail(static_cast<tb_status>(status), "validation reported errors");
    return TB_OK;
  });
}

#define TB_RUN_STAGE(name, fn)                                         \
  tb_status name(const tb_config* config) {                            \
    if (config == nullptr) return NullArgument("config");              \
    return Guard([&] {                                                 \
      fn(config->config);                                              \
      return TB_OK;                                                    \
    });                                                                \
  }

TB_RUN_STAGE(tb_run_tav, texbias::run_tav)
TB_RUN_STAGE(tb_run_analyze, texbias::run_analyze)
TB_RUN_STAGE(tb_run_humaneval_pack, texbias::run_humaneval_pack)
TB_RUN_STAGE(tb_run_humaneval_score, texbias::run_humaneval_score)
TB_RUN_STAGE(tb_run_synth, texbias::run_synth)

#undef TB_RUN_STAGE

}  // extern "C"
