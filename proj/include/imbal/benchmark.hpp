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

#ifndef IMBAL_BENCHMARK_HPP_
#define IMBAL_BENCHMARK_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "imbal/cancel.hpp"
#include "imbal/dataset.hpp"
#include "imbal/dataset_io.hpp"
#include "imbal/search.hpp"

namespace imbal {

enum class ImbalanceRegime { kBalanced, kImbalanced, kExtremelyImbalanced, kInvalid };
const char* RegimeName(ImbalanceRegime r);
ImbalanceRegime ParseRegime(const std::string& name);

enum class TaskKind { kBinary, kMulticlass };
const char* TaskKindName(TaskKind t);
TaskKind ParseTaskKind(const std::string& name);

inline constexpr double kImbalancedRatio = 3.0;
inline constexpr double kExtremeRatio = 20.0;
inline constexpr size_t kMinMinoritySize = 2;

// Ratio is majority / minority over all classes, whatever the task kind.
ImbalanceRegime ClassifyRegime(const ClassDistribution& dist, TaskKind task);

struct SuiteEntry {
  std::string name;
  std::string source;  // file path or openml:<id|name>
  ImbalanceRegime expected = ImbalanceRegime::kImbalanced;
  TaskKind task = TaskKind::kBinary;
  // Published summary counts; 0 when unknown.
  size_t majority_size = 0;
  size_t minority_size = 0;
  size_t num_features = 0;
  size_t num_instances = 0;
};

struct SuiteManifest {
  std::string name;
  std::vector<SuiteEntry> entries;
};

// Rejects duplicate sources and duplicate entry names.
SuiteManifest ParseManifest(const std::string& json_text);
SuiteManifest LoadManifest(const std::filesystem::path& path);
std::string ManifestToJson(const SuiteManifest& m);

struct RegimeFlag {
  std::string entry;
  ImbalanceRegime expected;
  ImbalanceRegime actual;
  std::string message;
};

// Entries whose published counts disagree with their expected regime.
// Entries without counts are not checked.
std::vector<RegimeFlag> AuditManifest(const SuiteManifest& m);

struct SuiteRunOptions {
  SearchConfig search;
  std::filesystem::path output_dir;
  // Relative file sources resolve against this directory.
  std::filesystem::path base_dir;
  std::filesystem::path openml_cache = DefaultOpenMlCacheDir();
  double holdout_fraction = 0.25;
  // Entries run concurrently when > 1.
  int parallel_entries = 1;
};

enum class EntryStatus { kCompleted, kResumed, kFailed };
const char* EntryStatusName(EntryStatus s);

struct SuiteEntryOutcome {
  std::string name;
  EntryStatus status = EntryStatus::kFailed;
  std::string reason;
  std::vector<std::string> warnings;
  std::string report_path;
  std::optional<ImbalanceRegime> actual_regime;
  std::optional<double> cv_score;
  std::optional<double> holdout_score;
  std::string best_pipeline;
};

struct SuiteReport {
  std::string suite;
  MetricId metric = MetricId::kBalancedAccuracy;
  std::vector<SuiteEntryOutcome> entries;
  int completed = 0;  // includes resumed
  int resumed = 0;
  int failed = 0;

  std::string ToJson() const;
  std::string RenderTable() const;
};

// Per-entry seed: HashCombine(search.seed, HashText(entry name)).
uint64_t EntrySeed(uint64_t seed, const std::string& entry_name);

// Writes <output_dir>/<entry>.json per entry and suite_report.json /
// suite_report.txt. Entries with a completed report on disk are not rerun.
SuiteReport RunSuite(const SuiteManifest& manifest, const SuiteRunOptions& options,
                     const CancelToken& cancel = CancelToken::None());

// Per-dataset scores of one system, in file order.
struct ScoreTable {
  std::string label;
  std::vector<std::pair<std::string, double>> scores;
};

// Accepts {"label": ..., "scores": [{"dataset": ..., "score": ...}, ...]},
// {"label": ..., "scores": {"name": score, ...}} or a suite report (holdout
// scores of completed entries).
ScoreTable ParseScoreTable(const std::string& json_text);
ScoreTable LoadScoreTable(const std::filesystem::path& path);

enum class Verdict { kWin, kDraw, kLose };
const char* VerdictName(Verdict v);

inline constexpr double kWinMargin = 0.01;
// Win iff a - b > margin, lose iff b - a > margin. Differences within 1e-9
// of the margin are draws, so decimal inputs at exactly the margin are not
// decided by rounding noise.
Verdict Judge(double a, double b, double margin = kWinMargin);

struct ComparisonRow {
  std::string dataset;
  double a = 0.0;
  double b = 0.0;
  Verdict verdict = Verdict::kDraw;
};

struct ComparisonOutcome {
  std::string label_a;
  std::string label_b;
  std::vector<ComparisonRow> rows;
  int wins = 0;
  int draws = 0;
  int losses = 0;

  std::string ToJson() const;
  // Columns dataset | a | b; the winning score carries a trailing '*'.
  std::string RenderTable() const;
};

// Rows follow `a`'s order. Both tables must name the same datasets.
ComparisonOutcome Compare(const ScoreTable& a, const ScoreTable& b);

}  // namespace imbal

#endif  // IMBAL_BENCHMARK_HPP_
