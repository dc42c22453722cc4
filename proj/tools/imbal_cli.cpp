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

#include <CLI11.hpp>
#include <algorithm>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "imbal/imbal.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

imbal_cancel* g_cancel = nullptr;

extern "C" void OnSignal(int) { imbal_cancel_stop(g_cancel); }

struct RuntimeFailure {
  std::string message;
};

void Check(imbal_status status, const std::string& what) {
  if (status != IMBAL_OK) throw RuntimeFailure{what + ": " + imbal_last_error()};
}

template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
  T** out() { return &p; }
  T* get() const { return p; }
};
using Dataset = Handle<imbal_dataset, imbal_dataset_free>;
using Config = Handle<imbal_search_config, imbal_search_config_free>;
using Report = Handle<imbal_search_report, imbal_search_report_free>;
using Features = Handle<imbal_metafeatures, imbal_metafeatures_free>;
using Store = Handle<imbal_store, imbal_store_free>;

struct OwnedString {
  char* p = nullptr;
  ~OwnedString() { imbal_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

void WriteAtomically(const fs::path& path, const std::string& text) {
  const fs::path partial = path.string() + ".partial";
  {
    std::ofstream out(partial, std::ios::binary | std::ios::trunc);
    if (!out) throw RuntimeFailure{"cannot write " + partial.string()};
    out << text;
    if (!out) throw RuntimeFailure{"write failed: " + partial.string()};
  }
  std::error_code ec;
  fs::rename(partial, path, ec);
  if (ec) throw RuntimeFailure{"cannot rename " + partial.string() + ": " + ec.message()};
}

bool IsOpenMl(const std::string& source) { return source.rfind("openml:", 0) == 0; }

// Validator for dataset arguments: an existing file or openml:<id|name>.
const CLI::Validator kDataSource(
    [](std::string& s) -> std::string {
      if (IsOpenMl(s)) return s.size() > 7 ? "" : "empty OpenML reference";
      return fs::is_regular_file(s) ? "" : "dataset file not found: " + s;
    },
    "FILE|openml:ID", "DataSource");

const std::vector<std::string> kMetrics = {"balanced_accuracy", "g_mean", "f1_macro", "sensitivity"};
const std::vector<std::string> kSearches = {"random", "asyncea", "asha"};
const std::vector<std::string> kCandidateModes = {"per-dataset", "total"};
const std::vector<std::string> kSimilarities = {"standardized", "raw-cosine"};

struct SearchFlags {
  double budget = 3600.0;
  std::string metric = "balanced_accuracy";
  std::string search = "asyncea";
  uint64_t seed = 0;
  int workers = 1;
  int folds = 5;
  int64_t max_evals = 0;
  int population = 50;

  void Add(CLI::App* app, const std::string& budget_flag = "--budget") {
    app->add_option(budget_flag, budget, "Search budget in seconds")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--metric", metric, "Optimization metric")->check(CLI::IsMember(kMetrics))->capture_default_str();
    app->add_option("--search", search, "Search algorithm")->check(CLI::IsMember(kSearches))->capture_default_str();
    app->add_option("--seed", seed, "Random seed")->capture_default_str();
    app->add_option("--workers", workers, "Concurrent evaluations")
        ->check(CLI::Range(1, 1024))
        ->capture_default_str();
    app->add_option("--folds", folds, "Cross-validation folds")->check(CLI::Range(2, 100))->capture_default_str();
    app->add_option("--max-evals", max_evals, "Stop after this many evaluations (0 = budget only)")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app->add_option("--population", population, "AsyncEA population size")
        ->check(CLI::Range(1, 100000))
        ->capture_default_str();
  }

  void Apply(imbal_search_config* cfg) const {
    Check(imbal_search_config_set_budget(cfg, budget), "budget");
    Check(imbal_search_config_set_metric(cfg, metric.c_str()), "metric");
    Check(imbal_search_config_set_algorithm(cfg, search.c_str()), "search");
    Check(imbal_search_config_set_seed(cfg, seed), "seed");
    Check(imbal_search_config_set_workers(cfg, workers), "workers");
    Check(imbal_search_config_set_folds(cfg, folds), "folds");
    Check(imbal_search_config_set_max_evaluations(cfg, max_evals), "max-evals");
    Check(imbal_search_config_set_population(cfg, population), "population");
  }
};

struct WarmStartFlags {
  std::string store;
  int candidates = 10;
  std::string mode = "per-dataset";
  std::string similarity = "standardized";

  void Add(CLI::App* app, bool required_store) {
    auto* opt = app->add_option("--warm-start,--store", store, "Metadata store JSON")->check(CLI::ExistingFile);
    if (required_store) opt->required();
    app->add_option("--candidates", candidates, "Warm-start candidates to retrieve")
        ->check(CLI::Range(1, 10000))
        ->capture_default_str();
    app->add_option("--candidate-mode", mode, "One pipeline per similar dataset, or m in total")
        ->check(CLI::IsMember(kCandidateModes))
        ->capture_default_str();
    app->add_option("--similarity", similarity, "Meta-feature similarity")
        ->check(CLI::IsMember(kSimilarities))
        ->capture_default_str();
  }
};

void PrintBest(const imbal_search_report* report) {
  int has_best = 0;
  OwnedString pipeline;
  double score = 0.0;
  Check(imbal_search_report_best(report, &has_best, &pipeline.p, &score), "report");
  int64_t completed = 0, timed_out = 0, failed = 0;
  Check(imbal_search_report_counts(report, &completed, &timed_out, &failed), "report");
  if (has_best) {
    std::printf("best: %s\nscore: %.6f\n", pipeline.p, score);
  } else {
    std::printf("no result: no evaluation completed within the budget\n");
  }
  std::printf("evaluations: %lld completed, %lld timed out, %lld failed\n", static_cast<long long>(completed),
              static_cast<long long>(timed_out), static_cast<long long>(failed));
}

std::vector<fs::path> DatasetFiles(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension().string();
    if (ext == ".csv" || ext == ".arff") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Automated pipeline search for imbalanced classification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(imbal_version()));

  // fit
  auto* fit = app.add_subcommand("fit", "Search for the best pipeline on a dataset");
  std::string fit_data, fit_out, fit_log;
  bool fit_reproducible = false;
  SearchFlags fit_search;
  WarmStartFlags fit_warm;
  fit->add_option("data", fit_data, "Dataset file (.csv/.arff) or openml:ID")->required()->check(kDataSource);
  fit_search.Add(fit);
  fit_warm.Add(fit, false);
  fit->add_option("--out", fit_out, "Write the search report JSON here");
  fit->add_option("--log", fit_log, "Append every evaluation to this JSON-lines file");
  fit->add_flag("--reproducible", fit_reproducible, "Omit timing fields so reports are byte-comparable");

  // resample
  auto* resample = app.add_subcommand("resample", "Apply one sampler and write the result as CSV");
  std::string rs_data, rs_sampler, rs_out;
  uint64_t rs_seed = 0;
  resample->add_option("data", rs_data, "Dataset file or openml:ID")->required()->check(kDataSource);
  resample->add_option("--sampler", rs_sampler, "Sampler step, e.g. \"SMOTE(k_neighbours=5)\"")->required();
  resample->add_option("--seed", rs_seed, "Random seed")->capture_default_str();
  resample->add_option("--out", rs_out, "Output CSV")->required();

  // meta
  auto* meta = app.add_subcommand("meta", "Metadata store commands");
  meta->require_subcommand(1);
  auto* build = meta->add_subcommand("build", "Search every dataset in a directory and store the best pipelines");
  std::string mb_dir, mb_store;
  std::vector<std::string> mb_exclude;
  size_t mb_top_k = 5;
  SearchFlags mb_search;
  mb_search.budget = 3600.0;
  build->add_option("datasets", mb_dir, "Directory of .csv/.arff files")->required()->check(CLI::ExistingDirectory);
  build->add_option("--store", mb_store, "Output store JSON")->required();
  build->add_option("--exclude", mb_exclude, "Dataset names to skip (no overlap with evaluation data)");
  build->add_option("--top-k", mb_top_k, "Pipelines kept per dataset")->check(CLI::Range(1, 1000))->capture_default_str();
  mb_search.Add(build, "--budget-per-dataset");

  auto* query = meta->add_subcommand("query", "Rank stored datasets and list warm-start candidates");
  std::string mq_data;
  uint64_t mq_seed = 0;
  WarmStartFlags mq_warm;
  query->add_option("data", mq_data, "Dataset file or openml:ID")->required()->check(kDataSource);
  query->add_option("--seed", mq_seed, "Seed for landmarker folds")->capture_default_str();
  mq_warm.Add(query, true);

  auto* features = meta->add_subcommand("features", "Print the meta-features of a dataset");
  std::string mf_data;
  uint64_t mf_seed = 0;
  features->add_option("data", mf_data, "Dataset file or openml:ID")->required()->check(kDataSource);
  features->add_option("--seed", mf_seed, "Seed for landmarker folds")->capture_default_str();

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "Benchmark suites");
  bench->require_subcommand(1);
  auto* classify = bench->add_subcommand("classify", "Classify imbalance regimes");
  std::string bc_manifest, bc_data, bc_task = "binary";
  size_t bc_majority = 0, bc_minority = 0;
  auto* bc_m = classify->add_option("--manifest", bc_manifest, "Audit a suite manifest")->check(CLI::ExistingFile);
  auto* bc_d = classify->add_option("--data", bc_data, "Classify a dataset")->check(kDataSource);
  auto* bc_maj = classify->add_option("--majority", bc_majority, "Majority class size");
  auto* bc_min = classify->add_option("--minority", bc_minority, "Minority class size");
  classify->add_option("--task", bc_task, "Task kind")->check(CLI::IsMember({"binary", "multiclass"}))->capture_default_str();
  bc_maj->needs(bc_min);
  bc_min->needs(bc_maj);
  bc_m->excludes(bc_d)->excludes(bc_maj);
  bc_d->excludes(bc_maj);

  auto* run = bench->add_subcommand("run", "Run a suite manifest");
  std::string br_manifest, br_out;
  double br_holdout = 0.25;
  int br_parallel = 1;
  SearchFlags br_search;
  run->add_option("manifest", br_manifest, "Suite manifest JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--out", br_out, "Output directory")->required();
  run->add_option("--holdout", br_holdout, "Held-out test fraction")->check(CLI::Range(0.01, 0.99))->capture_default_str();
  run->add_option("--parallel", br_parallel, "Entries run concurrently")->check(CLI::Range(1, 256))->capture_default_str();
  br_search.Add(run);

  // report
  auto* report = app.add_subcommand("report", "Report commands");
  report->require_subcommand(1);
  auto* compare = report->add_subcommand("compare", "Win/draw/lose table of two score tables");
  std::string rc_a, rc_b, rc_json;
  compare->add_option("a", rc_a, "First score table or suite report")->required()->check(CLI::ExistingFile);
  compare->add_option("b", rc_b, "Second score table or suite report")->required()->check(CLI::ExistingFile);
  compare->add_option("--json", rc_json, "Also write the comparison as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*classify && bc_manifest.empty() && bc_data.empty() && bc_maj->count() == 0) {
    std::cerr << "benchmark classify: one of --manifest, --data or --majority/--minority is required\n";
    return kExitUsage;
  }
  if (*build) {
    const auto files = DatasetFiles(mb_dir);
    if (files.empty()) {
      std::cerr << "meta build: no .csv or .arff files in " << mb_dir << "\n";
      return kExitUsage;
    }
  }

  Check(imbal_cancel_new(&g_cancel), "cancel");
  std::signal(SIGINT, OnSignal);
  std::signal(SIGTERM, OnSignal);

  int exit_code = kExitOk;
  try {
    if (*fit) {
      Dataset d;
      Check(imbal_dataset_load(fit_data.c_str(), d.out()), "load " + fit_data);
      Config cfg;
      Check(imbal_search_config_new(cfg.out()), "config");
      fit_search.Apply(cfg.get());
      if (!fit_log.empty()) Check(imbal_search_config_set_log_path(cfg.get(), fit_log.c_str()), "log");
      if (!fit_warm.store.empty()) {
        Store store;
        Check(imbal_store_load(fit_warm.store.c_str(), store.out()), "load store");
        Features f;
        Check(imbal_metafeatures_extract(d.get(), fit_search.seed, f.out()), "meta-features");
        Check(imbal_store_warm_start(store.get(), f.get(), fit_warm.candidates, fit_warm.mode.c_str(),
                                     fit_warm.similarity.c_str(), cfg.get()),
              "warm start");
        std::printf("warm start: %zu candidates\n", imbal_search_config_warm_start_count(cfg.get()));
      }
      Report r;
      Check(imbal_search_run(d.get(), cfg.get(), g_cancel, r.out()), "search");
      PrintBest(r.get());
      if (!fit_out.empty()) {
        OwnedString json;
        Check(imbal_search_report_to_json(r.get(), fit_reproducible ? 0 : 1, &json.p), "report");
        WriteAtomically(fit_out, json.str());
      }
    } else if (*resample) {
      Dataset d, out;
      Check(imbal_dataset_load(rs_data.c_str(), d.out()), "load " + rs_data);
      Check(imbal_resample(d.get(), rs_sampler.c_str(), rs_seed, out.out()), "resample");
      const std::string partial = rs_out + ".partial";
      Check(imbal_dataset_save_csv(out.get(), partial.c_str()), "write");
      fs::rename(partial, rs_out);
      std::printf("rows: %zu -> %zu\n", imbal_dataset_rows(d.get()), imbal_dataset_rows(out.get()));
    } else if (*build) {
      const std::set<std::string> excluded(mb_exclude.begin(), mb_exclude.end());
      Store store;
      Check(imbal_store_new(store.out()), "store");
      int failures = 0;
      for (const auto& file : DatasetFiles(mb_dir)) {
        const std::string name = file.stem().string();
        if (excluded.contains(name) || excluded.contains(file.filename().string())) {
          std::printf("skip %s (excluded)\n", name.c_str());
          continue;
        }
        try {
          Dataset d;
          Check(imbal_dataset_load(file.string().c_str(), d.out()), "load");
          Features f;
          Check(imbal_metafeatures_extract(d.get(), mb_search.seed, f.out()), "meta-features");
          Config cfg;
          Check(imbal_search_config_new(cfg.out()), "config");
          mb_search.Apply(cfg.get());
          Report r;
          Check(imbal_search_run(d.get(), cfg.get(), g_cancel, r.out()), "search");
          Check(imbal_store_insert(store.get(), name.c_str(), f.get(), r.get(), mb_top_k), "insert");
          std::printf("stored %s\n", name.c_str());
        } catch (const RuntimeFailure& e) {
          ++failures;
          std::fprintf(stderr, "failed %s: %s\n", name.c_str(), e.message.c_str());
        }
      }
      Check(imbal_store_save(store.get(), mb_store.c_str()), "save store");
      std::printf("records: %zu, failures: %d\n", imbal_store_size(store.get()), failures);
      if (imbal_store_size(store.get()) == 0) exit_code = kExitRuntime;
    } else if (*query) {
      Dataset d;
      Check(imbal_dataset_load(mq_data.c_str(), d.out()), "load " + mq_data);
      Store store;
      Check(imbal_store_load(mq_warm.store.c_str(), store.out()), "load store");
      Features f;
      Check(imbal_metafeatures_extract(d.get(), mq_seed, f.out()), "meta-features");
      OwnedString json;
      Check(imbal_store_query(store.get(), f.get(), mq_warm.candidates, mq_warm.mode.c_str(),
                              mq_warm.similarity.c_str(), &json.p),
            "query");
      std::fputs(json.p, stdout);
    } else if (*features) {
      Dataset d;
      Check(imbal_dataset_load(mf_data.c_str(), d.out()), "load " + mf_data);
      Features f;
      Check(imbal_metafeatures_extract(d.get(), mf_seed, f.out()), "meta-features");
      OwnedString json;
      Check(imbal_metafeatures_to_json(f.get(), &json.p), "meta-features");
      std::fputs(json.p, stdout);
    } else if (*classify) {
      if (!bc_manifest.empty()) {
        OwnedString json;
        Check(imbal_manifest_audit(bc_manifest.c_str(), &json.p), "audit");
        std::fputs(json.p, stdout);
      } else {
        const char* regime = nullptr;
        if (!bc_data.empty()) {
          Dataset d;
          Check(imbal_dataset_load(bc_data.c_str(), d.out()), "load " + bc_data);
          Check(imbal_classify_dataset(d.get(), bc_task.c_str(), &regime), "classify");
        } else {
          Check(imbal_classify_counts(bc_majority, bc_minority, bc_task.c_str(), &regime), "classify");
        }
        std::printf("%s\n", regime);
      }
    } else if (*run) {
      Config cfg;
      Check(imbal_search_config_new(cfg.out()), "config");
      br_search.Apply(cfg.get());
      OwnedString table;
      Check(imbal_suite_run(br_manifest.c_str(), cfg.get(), br_out.c_str(), br_holdout, br_parallel, g_cancel,
                            nullptr, &table.p),
            "suite");
      std::fputs(table.p, stdout);
    } else if (*compare) {
      OwnedString json, table;
      Check(imbal_compare(rc_a.c_str(), rc_b.c_str(), &json.p, &table.p), "compare");
      std::fputs(table.p, stdout);
      if (!rc_json.empty()) WriteAtomically(rc_json, json.str());
    }
  } catch (const RuntimeFailure& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    exit_code = kExitRuntime;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    exit_code = kExitRuntime;
  }
  std::signal(SIGINT, SIG_DFL);
  std::signal(SIGTERM, SIG_DFL);
  imbal_cancel_free(g_cancel);
  return exit_code;
}
