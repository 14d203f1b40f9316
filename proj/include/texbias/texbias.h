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

#ifndef TEXBIAS_TEXBIAS_H_
#define TEXBIAS_TEXBIAS_H_

/*
 * C interface to the texbias library.
 *
 * Objects are opaque handles created by a create, load or from function and
 * released with the matching free function. Every fallible call returns a
 * tb_status; on failure tb_last_error() describes the problem. The error
 * message is per thread and stays valid until the next failing call on that
 * thread.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(TB_BUILDING_LIBRARY)
#    define TB_API __declspec(dllexport)
#  else
#    define TB_API __declspec(dllimport)
#  endif
#else
#  define TB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values match the CLI exit codes. */
typedef enum tb_status {
  TB_OK = 0,
  TB_ERR_VALIDATION = 1,
  TB_ERR_MISSING_INPUT = 2,
  TB_ERR_INTERNAL = 3,
  TB_ERR_INVALID_ARGUMENT = 4
} tb_status;

typedef enum tb_entropy_mode {
  TB_ENTROPY_NORMALIZED = 0,
  TB_ENTROPY_RAW = 1
} tb_entropy_mode;

typedef struct tb_registry tb_registry;
typedef struct tb_tav tb_tav;
typedef struct tb_config tb_config;

typedef void (*tb_log_fn)(void* user_data, const char* line);

TB_API const char* tb_version(void);
TB_API const char* tb_last_error(void);
TB_API const char* tb_status_name(tb_status status);

/* Class registry */
TB_API tb_status tb_registry_load(const char* path, tb_registry** out);
TB_API void tb_registry_free(tb_registry* registry);
TB_API size_t tb_registry_texture_count(const tb_registry* registry);
TB_API size_t tb_registry_object_count(const tb_registry* registry);
/* NULL when the id is out of range. */
TB_API const char* tb_registry_texture_name(const tb_registry* registry, size_t id);
TB_API const char* tb_registry_object_name(const tb_registry* registry, size_t id);
/* Lowercase hex SHA-256; valid for the lifetime of the registry. */
TB_API const char* tb_registry_hash(const tb_registry* registry);

/* TAV matrix */
TB_API tb_status tb_tav_from_counts(const int64_t* counts, size_t textures, size_t objects,
                                    tb_entropy_mode mode, tb_tav** out);
TB_API tb_status tb_tav_from_texture_records(const tb_registry* registry, const char* path,
                                             tb_entropy_mode mode, unsigned workers,
                                             tb_tav** out);
TB_API void tb_tav_free(tb_tav* tav);
TB_API size_t tb_tav_texture_count(const tb_tav* tav);
TB_API size_t tb_tav_object_count(const tb_tav* tav);
TB_API tb_status tb_tav_value(const tb_tav* tav, size_t texture, size_t object, double* out);

/* Texture identification of one probability vector of length object_count. */
TB_API tb_status tb_tid_assign(const tb_tav* tav, const double* probs, size_t length,
                               int32_t* texture_id, double* similarity);

/* Run configuration. String keys: registry, texture-records, val-records,
 * adv-records, tav, val-assignments, adv-assignments, out, entropy,
 * assignments, image-refs, package, responses, package-id.
 * Integer keys: bins, top-k, seed, workers, count, textures, objects,
 * samples-per-texture, images-per-object.
 * Real keys: noise, adv-noise. */
TB_API tb_config* tb_config_create(void);
TB_API void tb_config_free(tb_config* config);
TB_API tb_status tb_config_set_string(tb_config* config, const char* key, const char* value);
TB_API tb_status tb_config_set_int(tb_config* config, const char* key, int64_t value);
TB_API tb_status tb_config_set_real(tb_config* config, const char* key, double value);
/* Notices and diagnostics; defaults to stderr. */
TB_API void tb_config_set_log(tb_config* config, tb_log_fn fn, void* user_data);

/* Pipeline stages. Each writes its outputs under the "out" directory. */
TB_API tb_status tb_run_validate(const tb_config* config);
TB_API tb_status tb_run_tav(const tb_config* config);
TB_API tb_status tb_run_analyze(const tb_config* config);
TB_API tb_status tb_run_humaneval_pack(const tb_config* config);
TB_API tb_status tb_run_humaneval_score(const tb_config* config);
TB_API tb_status tb_run_synth(const tb_config* config);

#ifdef __cplusplus
}
#endif

#endif /* TEXBIAS_TEXBIAS_H_ */
