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

#include "imbal/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <thread>

#include "imbal/error.hpp"
#include "imbal/evaluate.hpp"

namespace imbal {

using nlohmann::json;
using nlohmann::ordered_json;

const char* RegimeName(ImbalanceRegime r) {
  switch (r) {
    case ImbalanceRegime::kBalanced: return "balanced";
    case ImbalanceRegime::kImbalanced: return "imbalanced";
    case ImbalanceRegime::kExtremelyImbalanced: return "extremely_imbalanced";
    case ImbalanceRegime::kInvalid: return "invalid";
  }
  return "?";
}

ImbalanceRegime ParseRegime(const std::string& name) {
  for (auto r : {ImbalanceRegime::kBalanced, ImbalanceRegime::kImbalanced,
                 ImbalanceRegime::kExtremelyImbalanced, ImbalanceRegime::kInvalid}) {
    if (name == RegimeName(r)) return r;
  }
  Fail(ErrorCode::kInvalidArgument, "unknown regime '" + name + "'");
}

const char* TaskKindName(TaskKind t) { return t == TaskKind::kBinary ? "binary" : "multiclass"; }

TaskKind ParseTaskKind(const std::string& name) {
  if (name == "binary") return TaskKind::kBinary;
  if (name == "multiclass") return TaskKind::kMulticlass;
  Fail(ErrorCode::kInvalidArgument, "unknown task kind '" + name + "' (binary|multiclass)");
}

ImbalanceRegime ClassifyRegime(const ClassDistribution& dist, TaskKind) {
  if (dist.counts.size() < 2 || dist.minority_size < kMinMinoritySize) return ImbalanceRegime::kInvalid;
  const double ratio = static_cast<double>(dist.majority_size) / static_cast<double>(dist.minority_size);
  if (ratio >= kExtremeRatio) return ImbalanceRegime::kExtremelyImbalanced;
  if (ratio >= kImbalancedRatio) return ImbalanceRegime::kImbalanced;
  return ImbalanceRegime::kBalanced;
}

// ---------------------------------------------------------------------------
// Manifests

SuiteManifest ParseManifest(const std::string& json_text) {
  SuiteManifest m;
  try {
    const ordered_json j = ordered_json::parse(json_text);
    m.name = j.at("name").get<std::string>();
    std::set<std::string> sources, names;
    for (const auto& e : j.at("entries")) {
      SuiteEntry entry;
      entry.name = e.at("name").get<std::string>();
      entry.source = e.value("source", "openml:" + entry.name);
      entry.expected = ParseRegime(e.at("expected_regime").get<std::string>());
      entry.task = ParseTaskKind(e.at("task").get<std::string>());
      entry.majority_size = e.value("majority_size", size_t{0});
      entry.minority_size = e.value("minority_size", size_t{0});
      entry.num_features = e.value("num_features", size_t{0});
      entry.num_instances = e.value("num_instances", size_t{0});
      if (!sources.insert(entry.source).second) {
        Fail(ErrorCode::kSchema, "manifest '" + m.name + "': duplicate dataset source '" + entry.source + "'");
      }
      if (!names.insert(entry.name).second) {
        Fail(ErrorCode::kSchema, "manifest '" + m.name + "': duplicate entry name '" + entry.name + "'");
      }
      m.entries.push_back(std::move(entry));
    }
  } catch (const ordered_json::exception& e) {
    Fail(ErrorCode::kSchema, std::string("manifest: ") + e.what());
  }
  return m;
}

namespace {

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteAtomically(const std::filesystem::path& path, const std::string& text) {
  const std::filesystem::path partial = path.string() + ".partial";
  {
    std::ofstream out(partial, std::ios::binary | std::ios::trunc);
    if (!out) Fail(ErrorCode::kIo, "cannot write " + partial.string());
    out << text;
    if (!out) Fail(ErrorCode::kIo, "write failed: " + partial.string());
  }
  std::error_code ec;
  std::filesystem::rename(partial, path, ec);
  if (ec) Fail(ErrorCode::kIo, "cannot rename " + partial.string() + ": " + ec.message());
}

std::string FileStem(const std::string& name) {
  std::string out;
  for (char c : name) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out.push_back(keep ? c : '_');
  }
  return out.empty() ? "entry" : out;
}

std::string Fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string Pad(const std::string& s, size_t width, bool right = false) {
  if (s.size() >= width) return s;
  const std::string fill(width - s.size(), ' ');
  return right ? fill + s : s + fill;
}

}  // namespace

SuiteManifest LoadManifest(const std::filesystem::path& path) { return ParseManifest(ReadFile(path)); }

std::string ManifestToJson(const SuiteManifest& m) {
  ordered_json j;
  j["name"] = m.name;
  j["entries"] = ordered_json::array();
  for (const auto& e : m.entries) {
    ordered_json o{{"name", e.name},
                   {"source", e.source},
                   {"expected_regime", RegimeName(e.expected)},
                   {"task", TaskKindName(e.task)}};
    if (e.majority_size) o["majority_size"] = e.majority_size;
    if (e.minority_size) o["minority_size"] = e.minority_size;
    if (e.num_features) o["num_features"] = e.num_features;
    if (e.num_instances) o["num_instances"] = e.num_instances;
    j["entries"].push_back(std::move(o));
  }
  return j.dump(2) + "\n";
}

std::vector<RegimeFlag> AuditManifest(const SuiteManifest& m) {
  std::vector<RegimeFlag> flags;
  for (const auto& e : m.entries) {
    if (e.majority_size == 0 && e.minority_size == 0) continue;
    if (e.minority_size > e.majority_size) {
      flags.push_back({e.name, e.expected, ImbalanceRegime::kInvalid,
                       e.name + ": minority size exceeds majority size"});
      continue;
    }
    const auto actual = ClassifyRegime(ClassDistributionFromSizes(e.majority_size, e.minority_size), e.task);
    if (actual != e.expected) {
      flags.push_back({e.name, e.expected, actual,
                       e.name + ": counts " + std::to_string(e.majority_size) + "/" +
                           std::to_string(e.minority_size) + " classify as " + RegimeName(actual) +
                           ", manifest expects " + RegimeName(e.expected)});
    }
  }
  return flags;
}

// ---------------------------------------------------------------------------
// Suite runner

const char* EntryStatusName(EntryStatus s) {
  switch (s) {
    case EntryStatus::kCompleted: return "completed";
    case EntryStatus::kResumed: return "resumed";
    case EntryStatus::kFailed: return "failed";
  }
  return "?";
}

uint64_t EntrySeed(uint64_t seed, const std::string& entry_name) {
  return HashCombine(seed, HashText(entry_name));
}

namespace {

json OptionalNumber(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> NumberOrNone(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

std::optional<SuiteEntryOutcome> ReadCompleted(const std::filesystem::path& path, const std::string& name) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return std::nullopt;
  try {
    const json j = json::parse(ReadFile(path));
    if (j.value("format", "") != "imbal.suite_entry" || j.value("status", "") != "completed" ||
        j.value("entry", "") != name) {
      return std::nullopt;
    }
    SuiteEntryOutcome out;
    out.name = name;
    out.status = EntryStatus::kResumed;
    out.report_path = path.string();
    out.warnings = j.value("warnings", std::vector<std::string>{});
    if (j.contains("regime") && !j.at("regime").is_null()) out.actual_regime = ParseRegime(j.at("regime"));
    out.cv_score = NumberOrNone(j, "cv_score");
    out.holdout_score = NumberOrNone(j, "holdout_score");
    out.best_pipeline = j.value("best_pipeline", "");
    return out;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

SuiteEntryOutcome RunEntry(const SuiteEntry& entry, const SuiteRunOptions& options, const CancelToken& cancel) {
  const std::filesystem::path report_path = options.output_dir / (FileStem(entry.name) + ".json");
  if (auto done = ReadCompleted(report_path, entry.name)) return *done;

  SuiteEntryOutcome out;
  out.name = entry.name;
  out.report_path = report_path.string();
  Dataset d;
  try {
    d = LoadDatasetSource(entry.source, options.base_dir, options.openml_cache);
  } catch (const Error& e) {
    out.reason = std::string("cannot resolve dataset: ") + e.what();
    return out;
  }
  const auto dist = ComputeClassDistribution(d);
  const auto regime = ClassifyRegime(dist, entry.task);
  out.actual_regime = regime;
  if (regime != entry.expected) {
    out.warnings.push_back(std::string("expected regime ") + RegimeName(entry.expected) + ", observed " +
                           RegimeName(regime));
  }
  const bool binary = dist.counts.size() == 2;
  if (binary != (entry.task == TaskKind::kBinary)) {
    out.warnings.push_back(std::string("expected a ") + TaskKindName(entry.task) + " task, observed " +
                           std::to_string(dist.counts.size()) + " classes");
  }
  if (regime == ImbalanceRegime::kInvalid) {
    out.reason = "dataset needs at least two classes with at least " + std::to_string(kMinMinoritySize) +
                 " minority samples";
    return out;
  }

  SearchConfig cfg = options.search;
  cfg.seed = EntrySeed(options.search.seed, entry.name);
  const std::filesystem::path log_path = options.output_dir / (FileStem(entry.name) + ".evals.jsonl");
  std::filesystem::remove(log_path);
  cfg.log_path = log_path.string();
  try {
    Rng split_rng = Rng(cfg.seed).Child(2);
    const auto [train_rows, test_rows] = StratifiedHoldout(d.labels, options.holdout_fraction, split_rng);
    const Dataset train = d.Subset(train_rows);
    const Dataset test = d.Subset(test_rows);
    const SearchSpace space = SearchSpace::Default();
    const SearchReport report = RunSearch(space, train, cfg, cancel);
    if (report.best) {
      out.cv_score = report.best->mean_score;
      out.best_pipeline = report.best->pipeline_text;
      Rng final_rng = Rng(cfg.seed).Child(3);
      try {
        out.holdout_score =
            HoldoutFinal(ParsePipeline(report.best->pipeline_text, space), train, test, cfg.metric, final_rng);
      } catch (const Error& e) {
        out.warnings.push_back(std::string("holdout evaluation failed: ") + e.what());
      }
    } else {
      out.warnings.push_back("search produced no completed evaluation");
    }
    json doc{{"format", "imbal.suite_entry"},
             {"version", 1},
             {"entry", entry.name},
             {"source", entry.source},
             {"status", "completed"},
             {"expected_regime", RegimeName(entry.expected)},
             {"regime", RegimeName(regime)},
             {"warnings", out.warnings},
             {"cv_score", OptionalNumber(out.cv_score)},
             {"holdout_score", OptionalNumber(out.holdout_score)},
             {"best_pipeline", out.best_pipeline},
             {"search_report", json::parse(report.ToJson(true))}};
    WriteAtomically(report_path, doc.dump(2) + "\n");
    out.status = EntryStatus::kCompleted;
  } catch (const Error& e) {
    out.reason = e.what();
  }
  return out;
}

}  // namespace

SuiteReport RunSuite(const SuiteManifest& manifest, const SuiteRunOptions& options, const CancelToken& cancel) {
  options.search.Validate();
  if (options.output_dir.empty()) Fail(ErrorCode::kInvalidArgument, "suite output directory is required");
  if (!(options.holdout_fraction > 0.0 && options.holdout_fraction < 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "holdout fraction must lie in (0, 1)");
  }
  std::filesystem::create_directories(options.output_dir);
  SuiteReport report;
  report.suite = manifest.name;
  report.metric = options.search.metric;
  report.entries.resize(manifest.entries.size());
  const size_t jobs = static_cast<size_t>(std::max(1, options.parallel_entries));
  if (jobs == 1) {
    for (size_t i = 0; i < manifest.entries.size(); ++i) {
      report.entries[i] = RunEntry(manifest.entries[i], options, cancel);
    }
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (size_t t = 0; t < std::min(jobs, manifest.entries.size()); ++t) {
      pool.emplace_back([&] {
        for (size_t i = next++; i < manifest.entries.size(); i = next++) {
          report.entries[i] = RunEntry(manifest.entries[i], options, cancel);
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& e : report.entries) {
    if (e.status == EntryStatus::kFailed) {
      ++report.failed;
    } else {
      ++report.completed;
      if (e.status == EntryStatus::kResumed) ++report.resumed;
    }
  }
  WriteAtomically(options.output_dir / "suite_report.json", report.ToJson());
  WriteAtomically(options.output_dir / "suite_report.txt", report.RenderTable());
  return report;
}

std::string SuiteReport::ToJson() const {
  ordered_json j{{"format", "imbal.suite_report"},
                 {"version", 1},
                 {"suite", suite},
                 {"metric", MetricName(metric)},
                 {"completed", completed},
                 {"resumed", resumed},
                 {"failed", failed},
                 {"total", entries.size()}};
  j["entries"] = ordered_json::array();
  for (const auto& e : entries) {
    ordered_json o{{"name", e.name},
                   {"status", EntryStatusName(e.status)},
                   {"regime", e.actual_regime ? ordered_json(RegimeName(*e.actual_regime)) : ordered_json(nullptr)},
                   {"cv_score", e.cv_score ? ordered_json(*e.cv_score) : ordered_json(nullptr)},
                   {"holdout_score", e.holdout_score ? ordered_json(*e.holdout_score) : ordered_json(nullptr)},
                   {"best_pipeline", e.best_pipeline},
                   {"warnings", e.warnings},
                   {"report", e.report_path}};
    if (!e.reason.empty()) o["reason"] = e.reason;
    j["entries"].push_back(std::move(o));
  }
  return j.dump(2) + "\n";
}

std::string SuiteReport::RenderTable() const {
  size_t width = 7;
  for (const auto& e : entries) width = std::max(width, e.name.size());
  std::ostringstream out;
  out << Pad("dataset", width) << "  " << Pad("regime", 20) << "  " << Pad("cv", 8, true) << "  "
      << Pad("holdout", 8, true) << "  status\n";
  for (const auto& e : entries) {
    out << Pad(e.name, width) << "  " << Pad(e.actual_regime ? RegimeName(*e.actual_regime) : "-", 20) << "  "
        << Pad(e.cv_score ? Fixed(*e.cv_score) : "-", 8, true) << "  "
        << Pad(e.holdout_score ? Fixed(*e.holdout_score) : "-", 8, true) << "  " << EntryStatusName(e.status);
    if (!e.reason.empty()) out << " (" << e.reason << ")";
    for (const auto& w : e.warnings) out << " [warning: " << w << "]";
    out << '\n';
  }
  out << "completed " << completed << " (resumed " << resumed << "), failed " << failed << ", total "
      << entries.size() << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Comparison

ScoreTable ParseScoreTable(const std::string& json_text) {
  ScoreTable table;
  try {
    const ordered_json j = ordered_json::parse(json_text);
    if (j.value("format", "") == "imbal.suite_report") {
      table.label = j.at("suite").get<std::string>();
      for (const auto& e : j.at("entries")) {
        if (e.at("holdout_score").is_null()) continue;
        table.scores.emplace_back(e.at("name").get<std::string>(), e.at("holdout_score").get<double>());
      }
    } else {
      table.label = j.value("label", "");
      const auto& scores = j.at("scores");
      if (scores.is_array()) {
        for (const auto& s : scores) {
          table.scores.emplace_back(s.at("dataset").get<std::string>(), s.at("score").get<double>());
        }
      } else {
        for (const auto& [name, score] : scores.items()) table.scores.emplace_back(name, score.get<double>());
      }
    }
  } catch (const ordered_json::exception& e) {
    Fail(ErrorCode::kSchema, std::string("score table: ") + e.what());
  }
  std::set<std::string> seen;
  for (const auto& [name, score] : table.scores) {
    if (!seen.insert(name).second) Fail(ErrorCode::kSchema, "score table: duplicate dataset '" + name + "'");
    if (!std::isfinite(score)) Fail(ErrorCode::kSchema, "score table: non-finite score for '" + name + "'");
  }
  return table;
}

ScoreTable LoadScoreTable(const std::filesystem::path& path) { return ParseScoreTable(ReadFile(path)); }

const char* VerdictName(Verdict v) {
  switch (v) {
    case Verdict::kWin: return "win";
    case Verdict::kDraw: return "draw";
    case Verdict::kLose: return "lose";
  }
  return "?";
}

Verdict Judge(double a, double b, double margin) {
  constexpr double kSlack = 1e-9;
  if (a - b > margin + kSlack) return Verdict::kWin;
  if (b - a > margin + kSlack) return Verdict::kLose;
  return Verdict::kDraw;
}

ComparisonOutcome Compare(const ScoreTable& a, const ScoreTable& b) {
  std::map<std::string, double> lookup(b.scores.begin(), b.scores.end());
  for (const auto& [name, score] : a.scores) {
    if (!lookup.contains(name)) Fail(ErrorCode::kInvalidArgument, "dataset '" + name + "' missing from " +
                                                                      (b.label.empty() ? "second table" : b.label));
  }
  if (a.scores.size() != b.scores.size()) {
    std::set<std::string> names;
    for (const auto& s : a.scores) names.insert(s.first);
    for (const auto& s : b.scores) {
      if (!names.contains(s.first)) {
        Fail(ErrorCode::kInvalidArgument, "dataset '" + s.first + "' missing from " +
                                              (a.label.empty() ? "first table" : a.label));
      }
    }
  }
  ComparisonOutcome out;
  out.label_a = a.label;
  out.label_b = b.label;
  for (const auto& [name, score] : a.scores) {
    ComparisonRow row{name, score, lookup.at(name), Judge(score, lookup.at(name))};
    switch (row.verdict) {
      case Verdict::kWin: ++out.wins; break;
      case Verdict::kDraw: ++out.draws; break;
      case Verdict::kLose: ++out.losses; break;
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

std::string ComparisonOutcome::ToJson() const {
  ordered_json j{{"format", "imbal.comparison"},
                 {"version", 1},
                 {"label_a", label_a},
                 {"label_b", label_b},
                 {"margin", kWinMargin},
                 {"wins", wins},
                 {"draws", draws},
                 {"losses", losses}};
  j["rows"] = ordered_json::array();
  for (const auto& r : rows) {
    j["rows"].push_back({{"dataset", r.dataset}, {"a", r.a}, {"b", r.b}, {"verdict", VerdictName(r.verdict)}});
  }
  return j.dump(2) + "\n";
}

std::string ComparisonOutcome::RenderTable() const {
  const std::string head_a = label_a.empty() ? "a" : label_a;
  const std::string head_b = label_b.empty() ? "b" : label_b;
  size_t width = 7;
  for (const auto& r : rows) width = std::max(width, r.dataset.size());
  const size_t wa = std::max<size_t>(9, head_a.size());
  const size_t wb = std::max<size_t>(9, head_b.size());
  std::ostringstream out;
  out << Pad("dataset", width) << " | " << Pad(head_a, wa, true) << " | " << Pad(head_b, wb, true) << '\n';
  out << std::string(width, '-') << "-+-" << std::string(wa, '-') << "-+-" << std::string(wb, '-') << '\n';
  for (const auto& r : rows) {
    const std::string sa = Fixed(r.a) + (r.verdict == Verdict::kWin ? "*" : " ");
    const std::string sb = Fixed(r.b) + (r.verdict == Verdict::kLose ? "*" : " ");
    out << Pad(r.dataset, width) << " | " << Pad(sa, wa, true) << " | " << Pad(sb, wb, true) << '\n';
  }
  out << "wins " << wins << ", draws " << draws << ", losses " << losses << " (margin " << kWinMargin << ")\n";
  return out.str();
}

}  // namespace imbal
