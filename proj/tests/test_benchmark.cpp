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

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "imbal/benchmark.hpp"
#include "imbal/dataset_io.hpp"
#include "support.hpp"

namespace imbal {
namespace {

using testing::CodeOf;

ClassDistribution Sizes(std::vector<size_t> counts) {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (size_t c = 0; c < counts.size(); ++c) {
    for (size_t i = 0; i < counts[c]; ++i) {
      rows.push_back({0.0});
      labels.push_back(static_cast<int>(c));
    }
  }
  return ComputeClassDistribution(testing::FromRows(rows, labels));
}

std::filesystem::path Fixture(const std::string& rel) {
  return std::filesystem::path(IMBAL_SOURCE_DIR) / rel;
}

TEST_CASE("regime: reference examples and boundaries") {
  CHECK(ClassifyRegime(ClassDistributionFromSizes(10923, 260), TaskKind::kBinary) ==
        ImbalanceRegime::kExtremelyImbalanced);
  CHECK(ClassifyRegime(ClassDistributionFromSizes(3541, 231), TaskKind::kBinary) ==
        ImbalanceRegime::kImbalanced);
  CHECK(ClassifyRegime(ClassDistributionFromSizes(50, 50), TaskKind::kBinary) == ImbalanceRegime::kBalanced);
  CHECK(ClassifyRegime(ClassDistributionFromSizes(100, 1), TaskKind::kBinary) == ImbalanceRegime::kInvalid);

  CHECK(ClassifyRegime(ClassDistributionFromSizes(60, 3), TaskKind::kBinary) ==
        ImbalanceRegime::kExtremelyImbalanced);
  CHECK(ClassifyRegime(ClassDistributionFromSizes(59, 3), TaskKind::kBinary) == ImbalanceRegime::kImbalanced);
  CHECK(ClassifyRegime(ClassDistributionFromSizes(6, 2), TaskKind::kBinary) == ImbalanceRegime::kImbalanced);
  CHECK(ClassifyRegime(ClassDistributionFromSizes(5, 2), TaskKind::kBinary) == ImbalanceRegime::kBalanced);
  CHECK(ClassifyRegime(Sizes({7}), TaskKind::kBinary) == ImbalanceRegime::kInvalid);

  // Multiclass uses majority over minority across every class.
  CHECK(ClassifyRegime(Sizes({143, 20, 60, 100}), TaskKind::kMulticlass) == ImbalanceRegime::kImbalanced);
  CHECK(ClassifyRegime(Sizes({400, 300, 19}), TaskKind::kMulticlass) == ImbalanceRegime::kExtremelyImbalanced);
}

TEST_CASE("regime: every valid distribution falls in exactly one regime") {
  for (size_t minority = 2; minority < 40; ++minority) {
    for (size_t majority = minority; majority < 1200; majority += 7) {
      const double ratio = static_cast<double>(majority) / static_cast<double>(minority);
      const auto r = ClassifyRegime(ClassDistributionFromSizes(majority, minority), TaskKind::kBinary);
      const ImbalanceRegime want = ratio >= 20.0  ? ImbalanceRegime::kExtremelyImbalanced
                                   : ratio >= 3.0 ? ImbalanceRegime::kImbalanced
                                                  : ImbalanceRegime::kBalanced;
      REQUIRE(r == want);
    }
  }
  for (auto r : {ImbalanceRegime::kBalanced, ImbalanceRegime::kImbalanced, ImbalanceRegime::kExtremelyImbalanced,
                 ImbalanceRegime::kInvalid}) {
    CHECK(ParseRegime(RegimeName(r)) == r);
  }
  CHECK(CodeOf([] { ParseRegime("skewed"); }) != ErrorCode{});
}

TEST_CASE("manifest: duplicates rejected, round trip") {
  const std::string dup_source = R"({"name": "s", "entries": [
    {"name": "a", "source": "openml:x", "expected_regime": "imbalanced", "task": "binary"},
    {"name": "b", "source": "openml:x", "expected_regime": "imbalanced", "task": "binary"}]})";
  CHECK_THROWS_AS(ParseManifest(dup_source), Error);
  const std::string dup_name = R"({"name": "s", "entries": [
    {"name": "a", "source": "openml:x", "expected_regime": "imbalanced", "task": "binary"},
    {"name": "a", "source": "openml:y", "expected_regime": "imbalanced", "task": "binary"}]})";
  CHECK_THROWS_AS(ParseManifest(dup_name), Error);
  CHECK_THROWS_AS(ParseManifest("{\"name\": 3}"), Error);

  const std::string ok = R"({"name": "s", "entries": [
    {"name": "a", "source": "a.csv", "expected_regime": "extremely_imbalanced", "task": "multiclass",
     "majority_size": 400, "minority_size": 10},
    {"name": "b", "expected_regime": "balanced", "task": "binary"}]})";
  const SuiteManifest m = ParseManifest(ok);
  REQUIRE(m.entries.size() == 2);
  CHECK(m.entries[1].source == "openml:b");
  const SuiteManifest back = ParseManifest(ManifestToJson(m));
  REQUIRE(back.entries.size() == 2);
  CHECK(back.entries[0].source == "a.csv");
  CHECK(back.entries[0].task == TaskKind::kMulticlass);
  CHECK(back.entries[0].majority_size == 400);
  CHECK(back.entries[1].expected == ImbalanceRegime::kBalanced);
}

TEST_CASE("manifest: shipped suites have no duplicates and their sizes") {
  const std::vector<std::pair<std::string, size_t>> suites = {{"imbalanced_binary", 32},
                                                               {"extremely_imbalanced_binary", 11},
                                                               {"imbalanced_multiclass", 28},
                                                               {"extremely_imbalanced_multiclass", 22}};
  for (const auto& [name, count] : suites) {
    CAPTURE(name);
    const SuiteManifest m = LoadManifest(Fixture("data/suites/" + name + ".json"));
    CHECK(m.name == name);
    CHECK(m.entries.size() == count);
    for (const auto& f : AuditManifest(m)) MESSAGE(name << ": " << f.message);
  }
  const SuiteManifest binary = LoadManifest(Fixture("data/suites/imbalanced_binary.json"));
  CHECK(AuditManifest(binary).empty());
}

TEST_CASE("manifest audit flags summary counts outside the expected regime") {
  SuiteManifest m;
  m.name = "audit";
  SuiteEntry good{"good", "openml:good", ImbalanceRegime::kImbalanced, TaskKind::kBinary, 3541, 231, 30, 3772};
  SuiteEntry bad{"bad", "openml:bad", ImbalanceRegime::kImbalanced, TaskKind::kBinary, 10923, 260, 6, 11183};
  SuiteEntry unknown{"unknown", "openml:unknown", ImbalanceRegime::kBalanced, TaskKind::kBinary, 0, 0, 0, 0};
  m.entries = {good, bad, unknown};
  const auto flags = AuditManifest(m);
  REQUIRE(flags.size() == 1);
  CHECK(flags[0].entry == "bad");
  CHECK(flags[0].actual == ImbalanceRegime::kExtremelyImbalanced);
  CHECK(flags[0].message.find("bad") != std::string::npos);
}

TEST_CASE("judge: reference examples, margin and antisymmetry") {
  CHECK(Judge(0.727753, 0.570387) == Verdict::kWin);
  CHECK(Judge(1.0, 1.0) == Verdict::kDraw);
  CHECK(Judge(0.6, 0.833333) == Verdict::kLose);
  CHECK(Judge(0.51, 0.50) == Verdict::kDraw);
  CHECK(Judge(0.5101, 0.50) == Verdict::kWin);
  CHECK(Judge(0.50, 0.5101) == Verdict::kLose);

  Rng rng(5);
  for (int i = 0; i < 5000; ++i) {
    const double a = rng.Uniform01();
    const double b = rng.Uniform01();
    const Verdict ab = Judge(a, b);
    const Verdict ba = Judge(b, a);
    if (ab == Verdict::kWin) {
      REQUIRE(ba == Verdict::kLose);
    } else if (ab == Verdict::kLose) {
      REQUIRE(ba == Verdict::kWin);
    } else {
      REQUIRE(ba == Verdict::kDraw);
    }
  }
}

TEST_CASE("compare: suite fixtures reproduce the expected totals") {
  struct Expect {
    std::string suite;
    int wins, draws, losses;
  };
  // The imbalanced multiclass totals follow the per-dataset table.
  const std::vector<Expect> expected = {{"imbalanced_binary", 16, 11, 5},
                                        {"extremely_imbalanced_binary", 10, 0, 1},
                                        {"imbalanced_multiclass", 12, 11, 5},
                                        {"extremely_imbalanced_multiclass", 15, 0, 7}};
  for (const auto& e : expected) {
    CAPTURE(e.suite);
    const ScoreTable a = LoadScoreTable(Fixture("tests/fixtures/comparison/" + e.suite + "_a.json"));
    const ScoreTable b = LoadScoreTable(Fixture("tests/fixtures/comparison/" + e.suite + "_b.json"));
    const ComparisonOutcome out = Compare(a, b);
    CHECK(out.wins == e.wins);
    CHECK(out.draws == e.draws);
    CHECK(out.losses == e.losses);
    CHECK(out.wins + out.draws + out.losses == static_cast<int>(a.scores.size()));

    const ComparisonOutcome rev = Compare(b, a);
    CHECK(rev.wins == out.losses);
    CHECK(rev.losses == out.wins);
    CHECK(rev.draws == out.draws);

    const std::string table = out.RenderTable();
    int stars = 0;
    for (char c : table) stars += c == '*';
    CHECK(stars == out.wins + out.losses);
  }
}

TEST_CASE("compare: score table formats and key mismatch") {
  const ScoreTable list = ParseScoreTable(
      R"({"label": "x", "scores": [{"dataset": "p", "score": 0.727753}, {"dataset": "q", "score": 0.6}]})");
  const ScoreTable map = ParseScoreTable(R"({"label": "y", "scores": {"q": 0.833333, "p": 0.570387}})");
  const ComparisonOutcome out = Compare(list, map);
  REQUIRE(out.rows.size() == 2);
  CHECK(out.rows[0].dataset == "p");
  CHECK(out.rows[0].verdict == Verdict::kWin);
  CHECK(out.rows[1].verdict == Verdict::kLose);
  CHECK(out.label_a == "x");
  CHECK(out.label_b == "y");
  const auto j = nlohmann::json::parse(out.ToJson());
  CHECK(j.at("wins").get<int>() == 1);
  CHECK(j.at("losses").get<int>() == 1);

  const ScoreTable missing = ParseScoreTable(R"({"label": "z", "scores": {"p": 0.5}})");
  CHECK_THROWS_AS(Compare(list, missing), Error);
  const ScoreTable extra = ParseScoreTable(R"({"label": "z", "scores": {"p": 0.5, "q": 0.5, "r": 0.5}})");
  CHECK_THROWS_AS(Compare(list, extra), Error);
  CHECK_THROWS_AS(ParseScoreTable("[1, 2]"), Error);
}

SuiteRunOptions TinyRun(const std::filesystem::path& out) {
  SuiteRunOptions opt;
  opt.search.algorithm = SearchAlgorithm::kRandom;
  opt.search.budget_seconds = 30.0;
  opt.search.max_evaluations = 3;
  opt.search.folds = 3;
  opt.search.seed = 11;
  opt.output_dir = out;
  opt.base_dir = out.parent_path();
  return opt;
}

TEST_CASE("suite run: reports, resume and regime warnings") {
  const auto dir = testing::TempDir("suite_run");
  SaveCsv(testing::Gaussians({90, 20}, 3, 2.5, 1), dir / "alpha.csv");
  SaveCsv(testing::Gaussians({200, 8}, 3, 2.5, 2), dir / "beta.csv");
  SaveCsv(testing::Gaussians({50, 1}, 3, 2.5, 3), dir / "lonely.csv");

  SuiteManifest m;
  m.name = "tiny";
  m.entries = {{"alpha", "alpha.csv", ImbalanceRegime::kImbalanced, TaskKind::kBinary},
               {"beta", "beta.csv", ImbalanceRegime::kImbalanced, TaskKind::kBinary}};
  const auto out = dir / "out";
  const SuiteReport first = RunSuite(m, TinyRun(out));
  CHECK(first.completed == 2);
  CHECK(first.resumed == 0);
  CHECK(first.failed == 0);
  REQUIRE(first.entries.size() == 2);
  CHECK(first.entries[0].warnings.empty());
  REQUIRE(first.entries[1].actual_regime.has_value());
  CHECK(*first.entries[1].actual_regime == ImbalanceRegime::kExtremelyImbalanced);
  REQUIRE(first.entries[1].warnings.size() == 1);
  CHECK(first.entries[1].warnings[0].find("extremely_imbalanced") != std::string::npos);
  for (const auto& e : first.entries) {
    CHECK(e.status == EntryStatus::kCompleted);
    CHECK(std::filesystem::exists(e.report_path));
    REQUIRE(e.holdout_score.has_value());
    CHECK(*e.holdout_score >= 0.0);
    CHECK(*e.holdout_score <= 1.0);
    CHECK_FALSE(e.best_pipeline.empty());
  }
  CHECK(std::filesystem::exists(out / "suite_report.json"));
  CHECK(std::filesystem::exists(out / "suite_report.txt"));
  const auto summary = nlohmann::json::parse(testing::ReadText(out / "suite_report.json"));
  CHECK(summary.at("completed").get<int>() == 2);

  const auto stamp = std::filesystem::last_write_time(first.entries[0].report_path);
  const SuiteReport second = RunSuite(m, TinyRun(out));
  CHECK(second.completed == 2);
  CHECK(second.resumed == 2);
  for (size_t i = 0; i < 2; ++i) {
    CHECK(second.entries[i].status == EntryStatus::kResumed);
    CHECK(second.entries[i].holdout_score == first.entries[i].holdout_score);
    CHECK(second.entries[i].best_pipeline == first.entries[i].best_pipeline);
    CHECK(second.entries[i].warnings == first.entries[i].warnings);
  }
  CHECK(std::filesystem::last_write_time(first.entries[0].report_path) == stamp);

  // Scores feed straight into a comparison.
  const ScoreTable table = LoadScoreTable(out / "suite_report.json");
  CHECK(table.scores.size() == 2);
  CHECK(Compare(table, table).draws == 2);

  SuiteManifest broken;
  broken.name = "broken";
  broken.entries = {{"missing", "missing.csv", ImbalanceRegime::kImbalanced, TaskKind::kBinary},
                    {"lonely", "lonely.csv", ImbalanceRegime::kExtremelyImbalanced, TaskKind::kBinary},
                    {"alpha", "alpha.csv", ImbalanceRegime::kImbalanced, TaskKind::kBinary}};
  const SuiteReport third = RunSuite(broken, TinyRun(dir / "out_broken"));
  CHECK(third.failed == 2);
  CHECK(third.completed == 1);
  CHECK(third.entries[0].reason.find("cannot resolve") != std::string::npos);
  CHECK(third.entries[1].actual_regime == ImbalanceRegime::kInvalid);
  CHECK_FALSE(std::filesystem::exists(dir / "out_broken" / "missing.json"));
  CHECK(third.RenderTable().find("failed 2") != std::string::npos);
}

TEST_CASE("suite run: reproducible across fresh output directories") {
  const auto dir = testing::TempDir("suite_repro");
  SaveCsv(testing::Gaussians({60, 15}, 2, 2.0, 4), dir / "gamma.csv");
  SuiteManifest m;
  m.name = "repro";
  m.entries = {{"gamma", "gamma.csv", ImbalanceRegime::kImbalanced, TaskKind::kBinary}};
  const SuiteReport a = RunSuite(m, TinyRun(dir / "a"));
  const SuiteReport b = RunSuite(m, TinyRun(dir / "b"));
  REQUIRE(a.entries[0].holdout_score.has_value());
  CHECK(a.entries[0].holdout_score == b.entries[0].holdout_score);
  CHECK(a.entries[0].best_pipeline == b.entries[0].best_pipeline);
  CHECK(EntrySeed(11, "gamma") != EntrySeed(11, "delta"));
  CHECK(EntrySeed(11, "gamma") == EntrySeed(11, "gamma"));
}

}  // namespace
}  // namespace imbal
