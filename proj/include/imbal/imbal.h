/*
 * Copyright 2026 The imbal Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef IMBAL_IMBAL_H_
#define IMBAL_IMBAL_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define IMBAL_API __declspec(dllexport)
#else
#define IMBAL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum imbal_status {
  IMBAL_OK = 0,
  IMBAL_E_INVALID_ARGUMENT = 1,
  IMBAL_E_IO = 2,
  IMBAL_E_PARSE = 3,
  IMBAL_E_DOMAIN = 4,
  IMBAL_E_RUNTIME = 5,
  IMBAL_E_NETWORK = 6,
  IMBAL_E_SCHEMA = 7,
  IMBAL_E_CANCELLED = 8,
  IMBAL_E_INTERNAL = 9
} imbal_status;

/* Message of the last failed call on this thread ("" after success). */
IMBAL_API const char* imbal_last_error(void);
IMBAL_API const char* imbal_status_name(imbal_status status);
IMBAL_API const char* imbal_version(void);

/* Strings returned through char** out-parameters are owned by the caller. */
IMBAL_API void imbal_string_free(char* s);

/* ---- cancellation ---------------------------------------------------- */

typedef struct imbal_cancel imbal_cancel;
IMBAL_API imbal_status imbal_cancel_new(imbal_cancel** out);
/* Async-signal-safe: only sets an atomic flag. */
IMBAL_API void imbal_cancel_stop(imbal_cancel* token);
IMBAL_API void imbal_cancel_free(imbal_cancel* token);

/* ---- datasets -------------------------------------------------------- */

typedef struct imbal_dataset imbal_dataset;

/* "openml:<id|name>" or a .csv/.arff path. */
IMBAL_API imbal_status imbal_dataset_load(const char* source, imbal_dataset** out);
/* Row-major features; labels are class codes 0..k-1. */
IMBAL_API imbal_status imbal_dataset_from_arrays(const double* features, size_t rows, size_t cols,
                                                 const int* labels, imbal_dataset** out);
IMBAL_API imbal_status imbal_dataset_save_csv(const imbal_dataset* d, const char* path);
IMBAL_API size_t imbal_dataset_rows(const imbal_dataset* d);
IMBAL_API size_t imbal_dataset_cols(const imbal_dataset* d);
IMBAL_API size_t imbal_dataset_classes(const imbal_dataset* d);
/* Per-class counts of present classes, in class-code order. *out_len
   receives the number of present classes; `counts` may be NULL. */
IMBAL_API imbal_status imbal_dataset_class_counts(const imbal_dataset* d, size_t* counts, size_t capacity,
                                                  size_t* out_len);
/* Copies cell (row, col) of the feature matrix. */
IMBAL_API imbal_status imbal_dataset_value(const imbal_dataset* d, size_t row, size_t col, double* out);
IMBAL_API imbal_status imbal_dataset_label(const imbal_dataset* d, size_t row, int* out);
IMBAL_API void imbal_dataset_free(imbal_dataset* d);

/* Applies one sampler step, e.g. "SMOTE(k_neighbours=5)". */
IMBAL_API imbal_status imbal_resample(const imbal_dataset* d, const char* sampler, uint64_t seed,
                                      imbal_dataset** out);

/* ---- search ---------------------------------------------------------- */

typedef struct imbal_search_config imbal_search_config;
typedef struct imbal_search_report imbal_search_report;

IMBAL_API imbal_status imbal_search_config_new(imbal_search_config** out);
IMBAL_API void imbal_search_config_free(imbal_search_config* cfg);
/* "random", "asyncea" or "asha". */
IMBAL_API imbal_status imbal_search_config_set_algorithm(imbal_search_config* cfg, const char* name);
/* "balanced_accuracy", "g_mean", "f1_macro" or "sensitivity". */
IMBAL_API imbal_status imbal_search_config_set_metric(imbal_search_config* cfg, const char* name);
IMBAL_API imbal_status imbal_search_config_set_budget(imbal_search_config* cfg, double seconds);
IMBAL_API imbal_status imbal_search_config_set_workers(imbal_search_config* cfg, int workers);
IMBAL_API imbal_status imbal_search_config_set_seed(imbal_search_config* cfg, uint64_t seed);
IMBAL_API imbal_status imbal_search_config_set_folds(imbal_search_config* cfg, int folds);
/* 0 disables the cap. */
IMBAL_API imbal_status imbal_search_config_set_max_evaluations(imbal_search_config* cfg, int64_t n);
IMBAL_API imbal_status imbal_search_config_set_population(imbal_search_config* cfg, int size);
IMBAL_API imbal_status imbal_search_config_set_log_path(imbal_search_config* cfg, const char* path);
/* Appends a pipeline in canonical text form to the warm-start list. */
IMBAL_API imbal_status imbal_search_config_add_warm_start(imbal_search_config* cfg, const char* pipeline);
IMBAL_API size_t imbal_search_config_warm_start_count(const imbal_search_config* cfg);

/* `cancel` may be NULL. */
IMBAL_API imbal_status imbal_search_run(const imbal_dataset* d, const imbal_search_config* cfg,
                                        imbal_cancel* cancel, imbal_search_report** out);
/* *has_best is 0 when no evaluation completed; pipeline may then be NULL. */
IMBAL_API imbal_status imbal_search_report_best(const imbal_search_report* r, int* has_best, char** pipeline,
                                                double* score);
IMBAL_API imbal_status imbal_search_report_counts(const imbal_search_report* r, int64_t* completed,
                                                  int64_t* timed_out, int64_t* failed);
IMBAL_API imbal_status imbal_search_report_to_json(const imbal_search_report* r, int include_timing,
                                                   char** out);
IMBAL_API void imbal_search_report_free(imbal_search_report* r);

/* ---- meta-learning --------------------------------------------------- */

typedef struct imbal_metafeatures imbal_metafeatures;
typedef struct imbal_store imbal_store;

IMBAL_API imbal_status imbal_metafeatures_extract(const imbal_dataset* d, uint64_t seed,
                                                  imbal_metafeatures** out);
/* Object of name -> value (null when unavailable). */
IMBAL_API imbal_status imbal_metafeatures_to_json(const imbal_metafeatures* f, char** out);
IMBAL_API void imbal_metafeatures_free(imbal_metafeatures* f);

IMBAL_API imbal_status imbal_store_new(imbal_store** out);
IMBAL_API imbal_status imbal_store_load(const char* path, imbal_store** out);
IMBAL_API imbal_status imbal_store_save(const imbal_store* s, const char* path);
IMBAL_API size_t imbal_store_size(const imbal_store* s);
/* Records the best `top_k` distinct pipelines of `report` for dataset `name`. */
IMBAL_API imbal_status imbal_store_insert(imbal_store* s, const char* name, const imbal_metafeatures* f,
                                          const imbal_search_report* report, size_t top_k);
/* JSON {"ranking": [...], "candidates": [...]}. mode: "per-dataset" or
   "total"; similarity: "standardized" or "raw-cosine". */
IMBAL_API imbal_status imbal_store_query(const imbal_store* s, const imbal_metafeatures* f, int m,
                                         const char* mode, const char* similarity, char** out);
/* Adds the query's warm-start candidates to `cfg`. */
IMBAL_API imbal_status imbal_store_warm_start(const imbal_store* s, const imbal_metafeatures* f, int m,
                                              const char* mode, const char* similarity,
                                              imbal_search_config* cfg);
IMBAL_API void imbal_store_free(imbal_store* s);

/* ---- benchmark ------------------------------------------------------- */

/* task: "binary" or "multiclass". *regime points to a static string. */
IMBAL_API imbal_status imbal_classify_counts(size_t majority, size_t minority, const char* task,
                                             const char** regime);
IMBAL_API imbal_status imbal_classify_dataset(const imbal_dataset* d, const char* task, const char** regime);
/* JSON {"suite": ..., "entries": n, "flags": [...]}. */
IMBAL_API imbal_status imbal_manifest_audit(const char* manifest_path, char** out);
/* Runs a manifest; writes per-entry reports and the suite summary into
   output_dir. `summary_json` and `table` may be NULL. */
IMBAL_API imbal_status imbal_suite_run(const char* manifest_path, const imbal_search_config* cfg,
                                       const char* output_dir, double holdout_fraction, int parallel_entries,
                                       imbal_cancel* cancel, char** summary_json, char** table);
IMBAL_API imbal_status imbal_compare(const char* path_a, const char* path_b, char** json, char** table);

#ifdef __cplusplus
}
#endif

#endif  /* IMBAL_IMBAL_H_ */
