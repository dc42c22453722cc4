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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Run {
  int code = -1;
  std::string out;
};

Run Cli(const std::string& args) {
  const std::string cmd = std::string("'") + IMBAL_CLI_PATH + "' " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  size_t n = 0;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path Tmp(const std::string& name) {
  auto dir = fs::path(IMBAL_TEST_TMP) / ("cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string Read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Two shifted Gaussian-ish blobs written as CSV.
void WriteToy(const fs::path& path, int majority, int minority, unsigned seed) {
  std::ofstream out(path);
  out << "a,b,c,class\n";
  unsigned s = seed;
  auto next = [&s] {
    s = s * 1103515245u + 12345u;
    return static_cast<double>((s >> 8) % 10000) / 10000.0;
  };
  for (int i = 0; i < majority + minority; ++i) {
    const bool pos = i >= majority;
    const double shift = pos ? 1.5 : 0.0;
    out << next() + shift << ',' << next() + shift << ',' << next() << ',' << (pos ? "pos" : "neg") << '\n';
  }
}

std::string Q(const fs::path& p) { return "'" + p.string() + "'"; }

TEST_CASE("cli: help for every subcommand") {
  const std::vector<std::pair<std::string, std::vector<std::string>>> cases = {
      {"", {"fit", "resample", "meta", "benchmark", "report"}},
      {"fit", {"--budget", "--metric", "--search", "--warm-start", "--seed", "--out", "--workers"}},
      {"resample", {"--sampler", "--seed", "--out"}},
      {"meta build", {"--budget-per-dataset", "--store", "--exclude"}},
      {"meta query", {"--store", "--candidates"}},
      {"meta features", {"--seed"}},
      {"benchmark classify", {"--manifest", "--data", "--majority", "--minority", "--task"}},
      {"benchmark run", {"--out", "--holdout", "--budget"}},
      {"report compare", {"--json"}}};
  for (const auto& [sub, flags] : cases) {
    CAPTURE(sub);
    const Run r = Cli(sub + " --help");
    CHECK(r.code == 0);
    for (const auto& f : flags) {
      CAPTURE(f);
      CHECK(r.out.find(f) != std::string::npos);
    }
  }
}

TEST_CASE("cli: usage errors exit 1 before any work") {
  const auto dir = Tmp("usage");
  CHECK(Cli("").code == 1);
  CHECK(Cli("frobnicate").code == 1);
  const auto report = dir / "report.json";
  const Run missing = Cli("fit " + Q(dir / "absent.csv") + " --budget 5 --out " + Q(report));
  CHECK(missing.code == 1);
  CHECK_FALSE(fs::exists(report));
  CHECK_FALSE(fs::exists(report.string() + ".partial"));

  WriteToy(dir / "toy.csv", 40, 10, 1);
  CHECK(Cli("fit " + Q(dir / "toy.csv") + " --budget -3 --out " + Q(report)).code == 1);
  CHECK(Cli("fit " + Q(dir / "toy.csv") + " --metric accuracy --out " + Q(report)).code == 1);
  CHECK(Cli("fit " + Q(dir / "toy.csv") + " --search hillclimb").code == 1);
  CHECK(Cli("fit " + Q(dir / "toy.csv") + " --workers 0").code == 1);
  CHECK_FALSE(fs::exists(report));
  CHECK(Cli("resample " + Q(dir / "toy.csv") + " --out " + Q(dir / "x.csv")).code == 1);
  CHECK(Cli("benchmark classify").code == 1);
  CHECK(Cli("meta build " + Q(dir / "nowhere") + " --store " + Q(dir / "s.json")).code == 1);
  fs::create_directories(dir / "empty");
  CHECK(Cli("meta build " + Q(dir / "empty") + " --store " + Q(dir / "s.json")).code == 1);
}

TEST_CASE("cli: fit is reproducible and honors the metric flag") {
  const auto dir = Tmp("fit");
  WriteToy(dir / "toy.csv", 60, 15, 2);
  const std::string base = "fit " + Q(dir / "toy.csv") + " --budget 10 --seed 7 --max-evals 4 --folds 3 --reproducible";
  const Run a = Cli(base + " --out " + Q(dir / "a.json"));
  const Run b = Cli(base + " --out " + Q(dir / "b.json"));
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  CHECK(a.out.find("best: ") != std::string::npos);
  CHECK(a.out.find("score: ") != std::string::npos);
  CHECK(Read(dir / "a.json") == Read(dir / "b.json"));
  CHECK(json::parse(Read(dir / "a.json")).at("metric").get<std::string>() == "balanced_accuracy");

  const Run g = Cli("fit " + Q(dir / "toy.csv") + " --budget 10 --max-evals 2 --metric g_mean --out " +
                    Q(dir / "g.json"));
  REQUIRE(g.code == 0);
  CHECK(json::parse(Read(dir / "g.json")).at("metric").get<std::string>() == "g_mean");

  const Run log = Cli("fit " + Q(dir / "toy.csv") + " --budget 10 --max-evals 3 --search asha --log " +
                      Q(dir / "evals.jsonl"));
  REQUIRE(log.code == 0);
  std::ifstream in(dir / "evals.jsonl");
  int lines = 0;
  for (std::string line; std::getline(in, line);) {
    CHECK(json::accept(line));
    ++lines;
  }
  CHECK(lines == 3);
}

TEST_CASE("cli: resample writes a balanced CSV") {
  const auto dir = Tmp("resample");
  WriteToy(dir / "toy.csv", 40, 10, 3);
  const Run r = Cli("resample " + Q(dir / "toy.csv") + " --sampler 'SMOTE(k_neighbours=5)' --seed 4 --out " +
                    Q(dir / "out.csv"));
  REQUIRE(r.code == 0);
  CHECK(r.out.find("rows: 50 -> 80") != std::string::npos);
  std::ifstream in(dir / "out.csv");
  std::string line;
  std::getline(in, line);
  int pos = 0, neg = 0;
  while (std::getline(in, line)) {
    if (line.ends_with(",pos")) ++pos;
    if (line.ends_with(",neg")) ++neg;
  }
  CHECK(pos == 40);
  CHECK(neg == 40);

  const Run bad = Cli("resample " + Q(dir / "toy.csv") + " --sampler 'SMOTE(k_neighbours=30)' --out " +
                      Q(dir / "bad.csv"));
  CHECK(bad.code == 2);
  CHECK_FALSE(fs::exists(dir / "bad.csv"));
}

TEST_CASE("cli: meta build with exclusions and corrupt inputs, then warm-started fit") {
  const auto dir = Tmp("meta");
  fs::create_directories(dir / "data");
  WriteToy(dir / "data" / "one.csv", 40, 10, 4);
  WriteToy(dir / "data" / "two.csv", 45, 9, 5);
  WriteToy(dir / "data" / "three.csv", 50, 12, 6);
  const std::string flags = " --budget-per-dataset 15 --max-evals 3 --folds 3 --search random";

  const Run all = Cli("meta build " + Q(dir / "data") + " --store " + Q(dir / "all.json") + flags);
  REQUIRE(all.code == 0);
  CHECK(all.out.find("records: 3, failures: 0") != std::string::npos);

  const Run ex = Cli("meta build " + Q(dir / "data") + " --store " + Q(dir / "ex.json") + " --exclude two" + flags);
  REQUIRE(ex.code == 0);
  CHECK(ex.out.find("skip two") != std::string::npos);
  CHECK(ex.out.find("records: 2, failures: 0") != std::string::npos);

  {
    std::ofstream bad(dir / "data" / "two.csv");
    bad << "a,b,class\n1,2\n3\n";
  }
  const Run corrupt = Cli("meta build " + Q(dir / "data") + " --store " + Q(dir / "c.json") + flags);
  CHECK(corrupt.code == 0);
  CHECK(corrupt.out.find("failed two") != std::string::npos);
  CHECK(corrupt.out.find("records: 2, failures: 1") != std::string::npos);

  WriteToy(dir / "query.csv", 40, 8, 7);
  const Run q = Cli("meta query " + Q(dir / "query.csv") + " --store " + Q(dir / "all.json") + " --candidates 2");
  REQUIRE(q.code == 0);
  const json qj = json::parse(q.out);
  CHECK(qj.at("ranking").size() == 3);
  CHECK(qj.at("candidates").size() == 2);

  const Run f = Cli("meta features " + Q(dir / "query.csv"));
  REQUIRE(f.code == 0);
  CHECK(json::parse(f.out).size() == 36);

  const Run warm = Cli("fit " + Q(dir / "query.csv") + " --budget 10 --max-evals 3 --warm-start " +
                       Q(dir / "all.json") + " --candidates 3");
  REQUIRE(warm.code == 0);
  CHECK(warm.out.find("warm start: 3 candidates") != std::string::npos);
}

TEST_CASE("cli: benchmark classify, run and report compare") {
  const std::string src = IMBAL_SOURCE_DIR;
  Run r = Cli("benchmark classify --majority 10923 --minority 260");
  CHECK(r.code == 0);
  CHECK(r.out == "extremely_imbalanced\n");
  r = Cli("benchmark classify --majority 3541 --minority 231");
  CHECK(r.out == "imbalanced\n");
  r = Cli("benchmark classify --majority 100 --minority 1");
  CHECK(r.out == "invalid\n");
  r = Cli("benchmark classify --manifest '" + src + "/data/suites/imbalanced_multiclass.json'");
  CHECK(r.code == 0);
  CHECK(json::parse(r.out).at("entries").get<int>() == 28);

  const auto dir = Tmp("bench");
  const fs::path fa = src + "/tests/fixtures/comparison/extremely_imbalanced_binary_a.json";
  const fs::path fb = src + "/tests/fixtures/comparison/extremely_imbalanced_binary_b.json";
  r = Cli("report compare " + Q(fa) + " " + Q(fb) + " --json " + Q(dir / "cmp.json"));
  CHECK(r.code == 0);
  const json cmp = json::parse(Read(dir / "cmp.json"));
  CHECK(cmp.at("wins").get<int>() == 10);
  CHECK(cmp.at("draws").get<int>() == 0);
  CHECK(cmp.at("losses").get<int>() == 1);
  CHECK(Cli("report compare " + Q(fa) + " '" + src + "/tests/fixtures/comparison/imbalanced_binary_b.json'").code ==
        2);

  WriteToy(dir / "p.csv", 60, 12, 8);
  WriteToy(dir / "q.csv", 210, 9, 9);
  {
    std::ofstream m(dir / "suite.json");
    m << R"({"name": "cli", "entries": [
      {"name": "p", "source": "p.csv", "expected_regime": "imbalanced", "task": "binary"},
      {"name": "q", "source": "q.csv", "expected_regime": "imbalanced", "task": "binary"}]})";
  }
  const std::string run = "benchmark run " + Q(dir / "suite.json") + " --out " + Q(dir / "out") +
                          " --budget 30 --max-evals 2 --folds 3 --search random";
  r = Cli(run);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("completed 2 (resumed 0)") != std::string::npos);
  CHECK(r.out.find("warning: expected regime imbalanced, observed extremely_imbalanced") != std::string::npos);
  r = Cli(run);
  CHECK(r.out.find("completed 2 (resumed 2)") != std::string::npos);
  r = Cli("report compare " + Q(dir / "out" / "suite_report.json") + " " + Q(dir / "out" / "suite_report.json"));
  CHECK(r.code == 0);
}

}  // namespace
