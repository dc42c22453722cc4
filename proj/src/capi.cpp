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

#include "imbal/imbal.h"

#include <cstdlib>
#include <cstring>
#include <json.hpp>
#include <new>
#include <string>

#include "imbal/benchmark.hpp"
#include "imbal/dataset_io.hpp"
#include "imbal/metalearn.hpp"
#include "imbal/samplers.hpp"
#include "imbal/search.hpp"

struct imbal_cancel {
  imbal::CancelToken token;
};
struct imbal_dataset {
  imbal::Dataset d;
};
struct imbal_search_config {
  imbal::SearchConfig cfg;
};
struct imbal_search_report {
  imbal::SearchReport r;
};
struct imbal_metafeatures {
  imbal::MetaFeatureVector f;
};
struct imbal_store {
  imbal::MetadataStore s;
};

namespace {

using nlohmann::ordered_json;

thread_local std::string g_last_error;

imbal_status StatusOf(imbal::ErrorCode code) {
  switch (code) {
    case imbal::ErrorCode::kInvalidArgument: return IMBAL_E_INVALID_ARGUMENT;
    case imbal::ErrorCode::kIo: return IMBAL_E_IO;
    case imbal::ErrorCode::kParse: return IMBAL_E_PARSE;
    case imbal::ErrorCode::kDomain: return IMBAL_E_DOMAIN;
    case imbal::ErrorCode::kRuntime: return IMBAL_E_RUNTIME;
    case imbal::ErrorCode::kNetwork: return IMBAL_E_NETWORK;
    case imbal::ErrorCode::kSchema: return IMBAL_E_SCHEMA;
    case imbal::ErrorCode::kCancelled: return IMBAL_E_CANCELLED;
  }
  return IMBAL_E_INTERNAL;
}

template <typename F>
imbal_status Guard(F&& body) {
  try {
    body();
    g_last_error.clear();
    return IMBAL_OK;
  } catch (const imbal::Error& e) {
    g_last_error = e.what();
    return StatusOf(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return IMBAL_E_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return IMBAL_E_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return IMBAL_E_INTERNAL;
  }
}

void Require(const void* p, const char* what) {
  if (p == nullptr) imbal::Fail(imbal::ErrorCode::kInvalidArgument, std::string(what) + " is null");
}

char* Dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

const imbal::CancelToken& TokenOf(const imbal_cancel* c) {
  return c ? c->token : imbal::CancelToken::None();
}

}  // namespace

extern "C" {

const char* imbal_last_error(void) { return g_last_error.c_str(); }

const char* imbal_status_name(imbal_status status) {
  switch (status) {
    case IMBAL_OK: return "ok";
    case IMBAL_E_INVALID_ARGUMENT: return "invalid_argument";
    case IMBAL_E_IO: return "io";
    case IMBAL_E_PARSE: return "parse";
    case IMBAL_E_DOMAIN: return "domain";
    case IMBAL_E_RUNTIME: return "runtime";
    case IMBAL_E_NETWORK: return "network";
    case IMBAL_E_SCHEMA: return "schema";
    case IMBAL_E_CANCELLED: return "cancelled";
    case IMBAL_E_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* imbal_version(void) { return "0.1.0"; }

void imbal_string_free(char* s) { std::free(s); }

imbal_status imbal_cancel_new(imbal_cancel** out) {
  return Guard([&] {
    Require(out, "out");
    *out = new imbal_cancel();
  });
}

void imbal_cancel_stop(imbal_cancel* token) {
  if (token) token->token.Stop();
}

void imbal_cancel_free(imbal_cancel* token) { delete token; }

imbal_status imbal_dataset_load(const char* source, imbal_dataset** out) {
  return Guard([&] {
    Require(source, "source");
    Require(out, "out");
    *out = new imbal_dataset{imbal::LoadDatasetSource(source)};
  });
}

imbal_status imbal_dataset_from_arrays(const double* features, size_t rows, size_t cols, const int* labels,
                                       imbal_dataset** out) {
  return Guard([&] {
    Require(out, "out");
    if (rows > 0) {
      Require(labels, "labels");
      if (cols > 0) Require(features, "features");
    }
    imbal::Dataset d;
    d.name = "arrays";
    d.features = imbal::Matrix(rows, cols, std::vector<double>(features, features + rows * cols));
    d.labels.assign(labels, labels + rows);
    int max_label = -1;
    for (int l : d.labels) {
      if (l < 0) imbal::Fail(imbal::ErrorCode::kInvalidArgument, "labels must be non-negative class codes");
      max_label = std::max(max_label, l);
    }
    for (int c = 0; c <= max_label; ++c) d.label_names.push_back(std::to_string(c));
    d.columns = imbal::NumericColumns(cols);
    d.Validate();
    *out = new imbal_dataset{std::move(d)};
  });
}

imbal_status imbal_dataset_save_csv(const imbal_dataset* d, const char* path) {
  return Guard([&] {
    Require(d, "dataset");
    Require(path, "path");
    imbal::SaveCsv(d->d, path);
  });
}

size_t imbal_dataset_rows(const imbal_dataset* d) { return d ? d->d.rows() : 0; }
size_t imbal_dataset_cols(const imbal_dataset* d) { return d ? d->d.cols() : 0; }
size_t imbal_dataset_classes(const imbal_dataset* d) { return d ? d->d.num_classes() : 0; }

imbal_status imbal_dataset_class_counts(const imbal_dataset* d, size_t* counts, size_t capacity,
                                        size_t* out_len) {
  return Guard([&] {
    Require(d, "dataset");
    Require(out_len, "out_len");
    const auto dist = imbal::ComputeClassDistribution(d->d);
    *out_len = dist.counts.size();
    if (counts == nullptr) return;
    size_t i = 0;
    for (const auto& kv : dist.counts) {
      if (i == capacity) break;
      counts[i++] = kv.second;
    }
  });
}

imbal_status imbal_dataset_value(const imbal_dataset* d, size_t row, size_t col, double* out) {
  return Guard([&] {
    Require(d, "dataset");
    Require(out, "out");
    if (row >= d->d.rows() || col >= d->d.cols()) {
      imbal::Fail(imbal::ErrorCode::kInvalidArgument, "cell index out of range");
    }
    *out = d->d.features(row, col);
  });
}

imbal_status imbal_dataset_label(const imbal_dataset* d, size_t row, int* out) {
  return Guard([&] {
    Require(d, "dataset");
    Require(out, "out");
    if (row >= d->d.rows()) imbal::Fail(imbal::ErrorCode::kInvalidArgument, "row index out of range");
    *out = d->d.labels[row];
  });
}

void imbal_dataset_free(imbal_dataset* d) { delete d; }

imbal_status imbal_resample(const imbal_dataset* d, const char* sampler, uint64_t seed, imbal_dataset** out) {
  return Guard([&] {
    Require(d, "dataset");
    Require(sampler, "sampler");
    Require(out, "out");
    const imbal::Step step = imbal::ParseStep(sampler);
    if (imbal::CategoryOf(step) != imbal::StepCategory::kSampler) {
      imbal::Fail(imbal::ErrorCode::kInvalidArgument, "'" + step.component + "' is not a sampler");
    }
    imbal::Rng rng(seed);
    *out = new imbal_dataset{imbal::ApplySampler(imbal::ToSamplerSpec(step), d->d, rng)};
  });
}

imbal_status imbal_search_config_new(imbal_search_config** out) {
  return Guard([&] {
    Require(out, "out");
    *out = new imbal_search_config();
  });
}

void imbal_search_config_free(imbal_search_config* cfg) { delete cfg; }

#define IMBAL_CONFIG_SETTER(fn, type, body)                 \
  imbal_status fn(imbal_search_config* cfg, type value) {  \
    return Guard([&] {                                      \
      Require(cfg, "config");                               \
      body;                                                 \
    });                                                     \
  }

IMBAL_CONFIG_SETTER(imbal_search_config_set_algorithm, const char*,
                    Require(value, "algorithm");
                    cfg->cfg.algorithm = imbal::ParseSearchAlgorithm(value))
IMBAL_CONFIG_SETTER(imbal_search_config_set_metric, const char*,
                    Require(value, "metric");
                    cfg->cfg.metric = imbal::ParseMetric(value))
IMBAL_CONFIG_SETTER(imbal_search_config_set_budget, double,
                    if (!(value > 0.0)) imbal::Fail(imbal::ErrorCode::kInvalidArgument, "budget must be > 0");
                    cfg->cfg.budget_seconds = value)
IMBAL_CONFIG_SETTER(imbal_search_config_set_workers, int,
                    if (value < 1) imbal::Fail(imbal::ErrorCode::kInvalidArgument, "workers must be >= 1");
                    cfg->cfg.workers = value)
IMBAL_CONFIG_SETTER(imbal_search_config_set_seed, uint64_t, cfg->cfg.seed = value)
IMBAL_CONFIG_SETTER(imbal_search_config_set_folds, int,
                    if (value < 2) imbal::Fail(imbal::ErrorCode::kInvalidArgument, "folds must be >= 2");
                    cfg->cfg.folds = value)
IMBAL_CONFIG_SETTER(imbal_search_config_set_max_evaluations, int64_t,
                    if (value < 0) imbal::Fail(imbal::ErrorCode::kInvalidArgument, "max evaluations must be >= 0");
                    cfg->cfg.max_evaluations = value)
IMBAL_CONFIG_SETTER(imbal_search_config_set_population, int,
                    if (value < 1) imbal::Fail(imbal::ErrorCode::kInvalidArgument, "population must be >= 1");
                    cfg->cfg.population_size = value)
IMBAL_CONFIG_SETTER(imbal_search_config_set_log_path, const char*,
                    Require(value, "path");
                    cfg->cfg.log_path = value)
IMBAL_CONFIG_SETTER(imbal_search_config_add_warm_start, const char*,
                    Require(value, "pipeline");
                    cfg->cfg.warm_start.push_back(imbal::ParsePipeline(value)))

#undef IMBAL_CONFIG_SETTER

size_t imbal_search_config_warm_start_count(const imbal_search_config* cfg) {
  return cfg ? cfg->cfg.warm_start.size() : 0;
}

imbal_status imbal_search_run(const imbal_dataset* d, const imbal_search_config* cfg, imbal_cancel* cancel,
                              imbal_search_report** out) {
  return Guard([&] {
    Require(d, "dataset");
    Require(cfg, "config");
    Require(out, "out");
    const imbal::SearchSpace space = imbal::SearchSpace::Default();
    *out = new imbal_search_report{imbal::RunSearch(space, d->d, cfg->cfg, TokenOf(cancel))};
  });
}

imbal_status imbal_search_report_best(const imbal_search_report* r, int* has_best, char** pipeline,
                                      double* score) {
  return Guard([&] {
    Require(r, "report");
    Require(has_best, "has_best");
    *has_best = r->r.best ? 1 : 0;
    if (pipeline) *pipeline = r->r.best ? Dup(r->r.best->pipeline_text) : nullptr;
    if (score && r->r.best) *score = r->r.best->mean_score;
  });
}

imbal_status imbal_search_report_counts(const imbal_search_report* r, int64_t* completed, int64_t* timed_out,
                                        int64_t* failed) {
  return Guard([&] {
    Require(r, "report");
    if (completed) *completed = r->r.evaluations_completed;
    if (timed_out) *timed_out = r->r.evaluations_timed_out;
    if (failed) *failed = r->r.evaluations_failed;
  });
}

imbal_status imbal_search_report_to_json(const imbal_search_report* r, int include_timing, char** out) {
  return Guard([&] {
    Require(r, "report");
    Require(out, "out");
    *out = Dup(r->r.ToJson(include_timing != 0) + "\n");
  });
}

void imbal_search_report_free(imbal_search_report* r) { delete r; }

imbal_status imbal_metafeatures_extract(const imbal_dataset* d, uint64_t seed, imbal_metafeatures** out) {
  return Guard([&] {
    Require(d, "dataset");
    Require(out, "out");
    imbal::Rng rng(seed);
    *out = new imbal_metafeatures{imbal::ExtractMetaFeatures(d->d, rng)};
  });
}

imbal_status imbal_metafeatures_to_json(const imbal_metafeatures* f, char** out) {
  return Guard([&] {
    Require(f, "metafeatures");
    Require(out, "out");
    ordered_json j = ordered_json::object();
    const auto& names = imbal::MetaFeatureNames();
    for (size_t i = 0; i < names.size(); ++i) {
      const double v = f->f.values[i];
      j[names[i]] = imbal::IsNa(v) ? ordered_json(nullptr) : ordered_json(v);
    }
    *out = Dup(j.dump(2) + "\n");
  });
}

void imbal_metafeatures_free(imbal_metafeatures* f) { delete f; }

imbal_status imbal_store_new(imbal_store** out) {
  return Guard([&] {
    Require(out, "out");
    *out = new imbal_store();
  });
}

imbal_status imbal_store_load(const char* path, imbal_store** out) {
  return Guard([&] {
    Require(path, "path");
    Require(out, "out");
    *out = new imbal_store{imbal::MetadataStore::Load(path)};
  });
}

imbal_status imbal_store_save(const imbal_store* s, const char* path) {
  return Guard([&] {
    Require(s, "store");
    Require(path, "path");
    s->s.Save(path);
  });
}

size_t imbal_store_size(const imbal_store* s) { return s ? s->s.records().size() : 0; }

imbal_status imbal_store_insert(imbal_store* s, const char* name, const imbal_metafeatures* f,
                                const imbal_search_report* report, size_t top_k) {
  return Guard([&] {
    Require(s, "store");
    Require(name, "name");
    Require(f, "metafeatures");
    Require(report, "report");
    if (top_k == 0) imbal::Fail(imbal::ErrorCode::kInvalidArgument, "top_k must be >= 1");
    auto pipelines = imbal::TopPipelines(report->r, top_k);
    if (pipelines.empty()) {
      imbal::Fail(imbal::ErrorCode::kInvalidArgument, std::string("no completed pipeline to store for ") + name);
    }
    s->s.Insert({name, f->f, std::move(pipelines)});
  });
}

imbal_status imbal_store_query(const imbal_store* s, const imbal_metafeatures* f, int m, const char* mode,
                               const char* similarity, char** out) {
  return Guard([&] {
    Require(s, "store");
    Require(f, "metafeatures");
    Require(out, "out");
    const auto cmode = imbal::ParseCandidateMode(mode ? mode : "per-dataset");
    const auto smode = imbal::ParseSimilarityMode(similarity ? similarity : "standardized");
    ordered_json j;
    j["mode"] = imbal::CandidateModeName(cmode);
    j["similarity"] = imbal::SimilarityModeName(smode);
    j["ranking"] = ordered_json::array();
    for (const auto& r : imbal::RankRecords(s->s, f->f, smode)) {
      j["ranking"].push_back({{"dataset", s->s.records()[r.index].dataset}, {"similarity", r.similarity}});
    }
    j["candidates"] = ordered_json::array();
    for (const auto& c : imbal::WarmStartCandidates(s->s, f->f, m, cmode, smode)) {
      j["candidates"].push_back(
          {{"pipeline", c.pipeline}, {"dataset", c.dataset}, {"score", c.score}, {"similarity", c.similarity}});
    }
    *out = Dup(j.dump(2) + "\n");
  });
}

imbal_status imbal_store_warm_start(const imbal_store* s, const imbal_metafeatures* f, int m, const char* mode,
                                    const char* similarity, imbal_search_config* cfg) {
  return Guard([&] {
    Require(s, "store");
    Require(f, "metafeatures");
    Require(cfg, "config");
    const auto candidates = imbal::WarmStartCandidates(
        s->s, f->f, m, imbal::ParseCandidateMode(mode ? mode : "per-dataset"),
        imbal::ParseSimilarityMode(similarity ? similarity : "standardized"));
    for (const auto& c : candidates) cfg->cfg.warm_start.push_back(imbal::ParsePipeline(c.pipeline));
  });
}

void imbal_store_free(imbal_store* s) { delete s; }

imbal_status imbal_classify_counts(size_t majority, size_t minority, const char* task, const char** regime) {
  return Guard([&] {
    Require(task, "task");
    Require(regime, "regime");
    if (minority > majority) {
      imbal::Fail(imbal::ErrorCode::kInvalidArgument, "minority count exceeds majority count");
    }
    *regime = imbal::RegimeName(
        imbal::ClassifyRegime(imbal::ClassDistributionFromSizes(majority, minority), imbal::ParseTaskKind(task)));
  });
}

imbal_status imbal_classify_dataset(const imbal_dataset* d, const char* task, const char** regime) {
  return Guard([&] {
    Require(d, "dataset");
    Require(task, "task");
    Require(regime, "regime");
    *regime = imbal::RegimeName(
        imbal::ClassifyRegime(imbal::ComputeClassDistribution(d->d), imbal::ParseTaskKind(task)));
  });
}

imbal_status imbal_manifest_audit(const char* manifest_path, char** out) {
  return Guard([&] {
    Require(manifest_path, "manifest path");
    Require(out, "out");
    const auto manifest = imbal::LoadManifest(manifest_path);
    ordered_json j;
    j["suite"] = manifest.name;
    j["entries"] = manifest.entries.size();
    j["flags"] = ordered_json::array();
    for (const auto& f : imbal::AuditManifest(manifest)) {
      j["flags"].push_back({{"entry", f.entry},
                            {"expected", imbal::RegimeName(f.expected)},
                            {"actual", imbal::RegimeName(f.actual)},
                            {"message", f.message}});
    }
    *out = Dup(j.dump(2) + "\n");
  });
}

imbal_status imbal_suite_run(const char* manifest_path, const imbal_search_config* cfg, const char* output_dir,
                             double holdout_fraction, int parallel_entries, imbal_cancel* cancel,
                             char** summary_json, char** table) {
  return Guard([&] {
    Require(manifest_path, "manifest path");
    Require(cfg, "config");
    Require(output_dir, "output directory");
    const auto manifest = imbal::LoadManifest(manifest_path);
    imbal::SuiteRunOptions options;
    options.search = cfg->cfg;
    options.output_dir = output_dir;
    options.base_dir = std::filesystem::path(manifest_path).parent_path();
    options.holdout_fraction = holdout_fraction;
    options.parallel_entries = parallel_entries;
    const auto report = imbal::RunSuite(manifest, options, TokenOf(cancel));
    if (summary_json) *summary_json = Dup(report.ToJson());
    if (table) *table = Dup(report.RenderTable());
  });
}

imbal_status imbal_compare(const char* path_a, const char* path_b, char** json, char** table) {
  return Guard([&] {
    Require(path_a, "first path");
    Require(path_b, "second path");
    const auto outcome = imbal::Compare(imbal::LoadScoreTable(path_a), imbal::LoadScoreTable(path_b));
    if (json) *json = Dup(outcome.ToJson());
    if (table) *table = Dup(outcome.RenderTable());
  });
}

}  // extern "C"
