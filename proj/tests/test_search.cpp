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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <thread>

#include "imbal/search.hpp"
#include "support.hpp"

using namespace imbal;
using testing::Gaussians;

namespace {

const SearchSpace& Space() { return SearchSpace::Default(); }

EvaluationResult Scored(double score) {
  EvaluationResult r;
  r.status = EvalStatus::kOk;
  r.mean_score = score;
  r.fold_scores = {score};
  return r;
}

// Deterministic pseudo-score in [0, 1) from the pipeline; one pipeline in
// seven fails.
EvaluationResult HashScore(const Job& job) {
  const uint64_t h = HashCombine(job.pipeline.Hash(), 17);
  if (h % 7 == 0) {
    EvaluationResult r;
    r.status = EvalStatus::kError;
    r.error = "scripted failure";
    return r;
  }
  return Scored(static_cast<double>(h % 1000) / 1000.0);
}

bool NonDecreasing(const std::vector<double>& v) {
  for (size_t i = 1; i < v.size(); ++i) {
    if (v[i] < v[i - 1]) return false;
  }
  return true;
}

// Straight re-implementation of the steady-state loop for one worker.
struct EaOracle {
  struct Member {
    Pipeline pipeline;
    EvaluationResult result;
  };

  EaOracle(const SearchConfig& cfg) : cfg(cfg), rng(Rng(cfg.seed).Child(1)) {
    for (const auto& p : cfg.warm_start) {
      if (initial.size() == static_cast<size_t>(cfg.population_size)) break;
      if (seen.insert(p.Hash()).second) initial.push_back(p);
    }
    while (initial.size() < static_cast<size_t>(cfg.population_size)) {
      Pipeline p = RandomPipeline(Space(), rng);
      for (int retry = 0; retry < 10 && seen.contains(p.Hash()); ++retry) p = RandomPipeline(Space(), rng);
      seen.insert(p.Hash());
      initial.push_back(p);
    }
  }

  const Member& Tournament() {
    std::vector<size_t> ok;
    for (size_t i = 0; i < population.size(); ++i) {
      if (population[i].result.ok()) ok.push_back(i);
    }
    size_t best = ok[rng.Below(ok.size())];
    for (int t = 1; t < cfg.tournament_size; ++t) {
      const size_t pick = ok[rng.Below(ok.size())];
      if (population[pick].result.mean_score > population[best].result.mean_score) best = pick;
    }
    return population[best];
  }

  void Step(size_t t) {
    Pipeline child;
    bool is_initial = t < initial.size();
    if (is_initial) {
      child = initial[t];
      events.push_back("init " + child.Id());
    } else if (std::none_of(population.begin(), population.end(),
                            [](const Member& m) { return m.result.ok(); })) {
      child = RandomPipeline(Space(), rng);
      events.push_back("random " + child.Id());
    } else {
      std::string event;
      for (int attempt = 0; attempt < 10; ++attempt) {
        if (rng.Uniform01() < cfg.crossover_rate) {
          const Pipeline a = Tournament().pipeline;
          const Pipeline b = Tournament().pipeline;
          child = Crossover(a, b, rng);
          event = "crossover " + a.Id() + " " + b.Id() + " -> " + child.Id();
        } else {
          const Pipeline parent = Tournament().pipeline;
          const auto m = Mutate(parent, Space(), rng);
          child = m.pipeline;
          event = std::string("mutate:") + MutationMoveName(*m.move) + " " + parent.Id() + " -> " + child.Id();
        }
        if (!seen.contains(child.Hash())) break;
      }
      events.push_back(event);
    }
    seen.insert(child.Hash());
    Job job;
    job.pipeline = child;
    const auto result = HashScore(job);
    if (is_initial || population.size() < static_cast<size_t>(cfg.population_size)) {
      population.push_back({child, result});
      return;
    }
    size_t worst = 0;
    for (size_t i = 1; i < population.size(); ++i) {
      if (WorseThan(population[i].result, population[worst].result)) worst = i;
    }
    if (WorseThan(population[worst].result, result)) {
      population[worst] = {child, result};
      events.push_back("replace " + std::to_string(worst));
    } else {
      events.push_back("discard " + child.Id());
    }
  }

  SearchConfig cfg;
  Rng rng;
  std::vector<Pipeline> initial;
  std::set<uint64_t> seen;
  std::vector<Member> population;
  std::vector<std::string> events;
};

SearchConfig Scripted(SearchAlgorithm algorithm, int64_t max_evals) {
  SearchConfig cfg;
  cfg.algorithm = algorithm;
  cfg.budget_seconds = 600;
  cfg.max_evaluations = max_evals;
  cfg.seed = 3;
  return cfg;
}

}  // namespace

TEST_CASE("search config validation and names") {
  SearchConfig cfg;
  CHECK_NOTHROW(cfg.Validate());
  cfg.workers = 0;
  CHECK_THROWS_AS(cfg.Validate(), Error);
  cfg.workers = 1;
  cfg.budget_seconds = 0;
  CHECK_THROWS_AS(cfg.Validate(), Error);
  CHECK(ParseSearchAlgorithm("asha") == SearchAlgorithm::kAsha);
  CHECK(std::string(SearchAlgorithmName(SearchAlgorithm::kAsyncEa)) == "asyncea");
  CHECK_THROWS_AS(ParseSearchAlgorithm("tpe"), Error);
}

TEST_CASE("asha: rung schedule") {
  const auto rungs = AshaRungs(1.0 / 9.0, 3);
  REQUIRE(rungs.size() == 3);
  CHECK(rungs[0] == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
  CHECK(rungs[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(rungs[2] == 1.0);
  CHECK(AshaRungs(1.0, 3) == std::vector<double>{1.0});
  CHECK(AshaRungs(0.25, 2).size() == 3);
  CHECK(AshaRungs(0.2, 3).size() == 3);
}

TEST_CASE("asha: nine strictly ordered configs promote three then one") {
  std::vector<Pipeline> configs;
  Rng rng(1);
  while (configs.size() < 9) {
    auto p = RandomPipeline(Space(), rng);
    if (std::none_of(configs.begin(), configs.end(), [&](const Pipeline& q) { return q == p; })) {
      configs.push_back(p);
    }
  }
  // Config i scores 1 - i/10 at every rung; dispatch is best first.
  auto cfg = Scripted(SearchAlgorithm::kAsha, 0);
  AshaStrategy asha(configs, cfg);
  const Evaluator evaluator = [&](const Job& job, const CancelToken&) {
    return Scored(1.0 - static_cast<double>(job.config_id) / 10.0);
  };
  const auto report = RunSearch(asha, evaluator, cfg);
  std::map<int, std::set<int64_t>> at_rung;
  for (const auto& r : report.history) at_rung[r.rung].insert(r.config_id);
  CHECK(at_rung[0].size() == 9);
  CHECK(at_rung[1] == std::set<int64_t>{0, 1, 2});
  CHECK(at_rung[2] == std::set<int64_t>{0});
  CHECK(asha.promotions() == std::vector<int>{0, 3, 1});
  for (const auto& r : report.history) {
    CHECK(r.resource == asha.rungs()[static_cast<size_t>(r.rung)]);
  }
  REQUIRE(report.best);
  CHECK(report.best->rung == 2);
  CHECK(report.best->config_id == 0);
  const auto audit = AuditAsha(report.history, 3);
  CHECK(audit.ok);
  CHECK(audit.promotions == std::vector<int>{0, 3, 1});
}

TEST_CASE("asha: audit passes on random asynchronous schedules and flags violations") {
  for (uint64_t seed = 1; seed <= 4; ++seed) {
    auto cfg = Scripted(SearchAlgorithm::kAsha, 120);
    cfg.workers = 3;
    cfg.seed = seed;
    AshaStrategy asha(Space(), cfg);
    const Evaluator evaluator = [seed](const Job& job, const CancelToken&) {
      Rng r(HashCombine(HashCombine(seed, job.pipeline.Hash()), static_cast<uint64_t>(job.rung)));
      std::this_thread::sleep_for(std::chrono::microseconds(200 + r.Below(3000)));
      return HashScore(job);
    };
    const auto report = RunSearch(asha, evaluator, cfg);
    CHECK(report.history.size() == 120);
    const auto audit = AuditAsha(report.history, 3);
    for (const auto& v : audit.violations) INFO(v);
    CHECK(audit.ok);
    CHECK(audit.promotions.size() >= 2);
    CHECK(audit.promotions[1] > 0);
  }

  // Config 5 enters rung 1 before rung 0 has three results.
  std::vector<EvaluationResult> history;
  for (int i = 0; i < 2; ++i) {
    auto r = Scored(0.5 + i * 0.1);
    r.config_id = i;
    r.rung = 0;
    r.sequence = i;
    history.push_back(r);
  }
  auto bad = Scored(0.9);
  bad.config_id = 1;
  bad.rung = 1;
  bad.sequence = 2;
  bad.dispatch_index = 2;
  history.push_back(bad);
  const auto audit = AuditAsha(history, 3);
  CHECK_FALSE(audit.ok);
  REQUIRE(audit.violations.size() == 1);
  CHECK(audit.violations[0].find("config 1") != std::string::npos);

  auto dup = history;
  dup.pop_back();
  auto again = dup[0];
  again.sequence = 5;
  dup.push_back(again);
  CHECK_FALSE(AuditAsha(dup, 3).ok);
}

TEST_CASE("asyncea: single-worker run equals the hand-stepped oracle") {
  for (uint64_t seed : {3u, 8u}) {
    auto cfg = Scripted(SearchAlgorithm::kAsyncEa, 40);
    cfg.seed = seed;
    cfg.population_size = 6;
    AsyncEaStrategy ea(Space(), cfg);
    const auto report = RunSearch(ea, [](const Job& job, const CancelToken&) { return HashScore(job); }, cfg);
    EaOracle oracle(cfg);
    for (size_t t = 0; t < 40; ++t) oracle.Step(t);
    CHECK(ea.events() == oracle.events);
    REQUIRE(ea.population().size() == oracle.population.size());
    for (size_t i = 0; i < oracle.population.size(); ++i) {
      CHECK(ea.population()[i].pipeline == oracle.population[i].pipeline);
    }
    CHECK(ea.population().size() == 6);
    CHECK(NonDecreasing(report.incumbent_trace));
    CHECK(report.history.size() == 40);
    size_t failures = 0;
    for (const auto& r : report.history) failures += !r.ok();
    CHECK(report.evaluations_failed == static_cast<int64_t>(failures));
  }
}

TEST_CASE("asyncea: population cap holds under concurrent completion") {
  auto cfg = Scripted(SearchAlgorithm::kAsyncEa, 80);
  cfg.population_size = 5;
  cfg.workers = 4;
  AsyncEaStrategy ea(Space(), cfg);
  const Evaluator evaluator = [](const Job& job, const CancelToken&) {
    std::this_thread::sleep_for(std::chrono::microseconds(100 + job.pipeline.Hash() % 2000));
    return HashScore(job);
  };
  const auto report = RunSearch(ea, evaluator, cfg);
  CHECK(report.history.size() == 80);
  CHECK(ea.population().size() <= 5);
  CHECK(NonDecreasing(report.incumbent_trace));
  // Parents named in the trace were always ok members.
  std::set<std::string> ok_ids;
  for (const auto& r : report.history) {
    if (r.ok()) ok_ids.insert(r.pipeline_id);
  }
  for (const auto& e : ea.events()) {
    if (e.rfind("mutate:", 0) == 0) {
      const auto parent = e.substr(e.find(' ') + 1, 16);
      CHECK(ok_ids.contains(parent));
    }
  }
}

TEST_CASE("random search: counting, determinism, separable data") {
  auto cfg = Scripted(SearchAlgorithm::kRandom, 0);
  cfg.budget_seconds = 0.8;
  RandomStrategy random(Space(), cfg);
  const Evaluator slow = [](const Job&, const CancelToken&) {
    std::this_thread::sleep_for(std::chrono::milliseconds(300));
    return Scored(0.5);
  };
  const auto counted = RunSearch(random, slow, cfg);
  CHECK(counted.history.size() == 3);

  const auto d = Gaussians({40, 12}, 3, 10.0, 1);
  SearchConfig det;
  det.algorithm = SearchAlgorithm::kRandom;
  det.budget_seconds = 600;
  det.max_evaluations = 12;
  det.seed = 5;
  det.folds = 3;
  const auto a = RunSearch(Space(), d, det);
  const auto b = RunSearch(Space(), d, det);
  CHECK(a.ToJson(false) == b.ToJson(false));
  CHECK(a.ToJson(false).find("wall_clock") == std::string::npos);

  det.budget_seconds = 10;
  det.max_evaluations = 40;
  const auto found = RunSearch(Space(), d, det);
  REQUIRE(found.best);
  CHECK(found.best->mean_score == 1.0);
  CHECK(found.wall_clock <= 10.0 + 1.0);
  const auto back = SearchReportFromJson(found.ToJson());
  CHECK(back.history.size() == found.history.size());
  CHECK(back.best->pipeline_text == found.best->pipeline_text);
}

TEST_CASE("no completed evaluation yields an explicit empty result") {
  auto cfg = Scripted(SearchAlgorithm::kRandom, 0);
  cfg.budget_seconds = 0.3;
  cfg.workers = 2;
  RandomStrategy random(Space(), cfg);
  const Evaluator hang = [](const Job&, const CancelToken& token) {
    while (true) {
      token.Check();
      std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
    return EvaluationResult{};
  };
  const auto report = RunSearch(random, hang, cfg);
  CHECK(report.no_result);
  CHECK_FALSE(report.best);
  CHECK(report.evaluations_completed == 0);
  CHECK(report.evaluations_timed_out == static_cast<int64_t>(report.history.size()));
  CHECK(report.wall_clock <= 0.3 + 0.03 + 0.05);
  CHECK(report.ToJson().find("\"best\": null") != std::string::npos);
}

TEST_CASE("warm start dominance and anytime property on real evaluations") {
  const auto d = Gaussians({160, 40}, 4, 1.2, 2);
  const auto warm = ParsePipeline("SMOTE() >> GaussianNB()");
  SearchConfig cfg;
  cfg.budget_seconds = 600;
  cfg.folds = 3;
  cfg.seed = 4;
  cfg.warm_start = {warm};

  Rng fold_rng = Rng(cfg.seed).Child(0);
  const auto folds = StratifiedFolds(d, cfg.folds, fold_rng);
  const auto direct = MakeEvaluator(d, folds, cfg)(Job{warm, 0, -1, 1.0}, CancelToken::None());

  for (auto algorithm : {SearchAlgorithm::kRandom, SearchAlgorithm::kAsyncEa, SearchAlgorithm::kAsha}) {
    const std::string name = SearchAlgorithmName(algorithm);
    CAPTURE(name);
    cfg.algorithm = algorithm;
    cfg.max_evaluations = 1;
    const auto one = RunSearch(Space(), d, cfg);
    REQUIRE(one.best);
    CHECK(one.best->pipeline_text == warm.ToText());
    if (algorithm != SearchAlgorithm::kAsha) CHECK(one.best->mean_score == direct.mean_score);

    cfg.max_evaluations = 0;
    cfg.budget_seconds = 3.0;
    cfg.workers = 2;
    const auto run = RunSearch(Space(), d, cfg);
    cfg.budget_seconds = 600;
    cfg.workers = 1;
    CHECK(run.wall_clock <= 3.0 + 0.3 + 0.25);
    REQUIRE(!run.incumbent_trace.empty());
    if (algorithm == SearchAlgorithm::kAsha) {
      // Monotone before and after the first full-resource result.
      size_t split = run.history.size();
      for (size_t i = 0; i < run.history.size(); ++i) {
        if (run.history[i].rung == 2 && run.history[i].ok()) {
          split = i;
          break;
        }
      }
      CHECK(NonDecreasing({run.incumbent_trace.begin(), run.incumbent_trace.begin() + split}));
      CHECK(NonDecreasing({run.incumbent_trace.begin() + split, run.incumbent_trace.end()}));
    } else {
      CHECK(NonDecreasing(run.incumbent_trace));
      CHECK(run.best->mean_score >= direct.mean_score);
    }
    double best_ok = -1;
    for (const auto& r : run.history) {
      if (r.ok() && (algorithm != SearchAlgorithm::kAsha || r.rung == 2)) best_ok = std::max(best_ok, r.mean_score);
    }
    if (best_ok >= 0) CHECK(run.best->mean_score == best_ok);
  }
}

TEST_CASE("evaluator: full resource uses the untouched fold plan") {
  const auto d = Gaussians({50, 14}, 3, 1.0, 6);
  SearchConfig cfg;
  cfg.folds = 4;
  Rng fold_rng(2);
  const auto folds = StratifiedFolds(d, 4, fold_rng);
  const auto p = ParsePipeline("ADASYN() >> LogisticRegression()");
  const auto via_search = MakeEvaluator(d, folds, cfg)(Job{p, 0, 2, 1.0}, CancelToken::None());
  EvalOptions options;
  options.positive_class = 1;
  Rng rng(HashCombine(HashCombine(cfg.seed, p.Hash()), std::bit_cast<uint64_t>(1.0)));
  const auto direct = Evaluate(p, d, folds, options, rng);
  CHECK(via_search.fold_scores == direct.fold_scores);

  std::vector<size_t> all(d.rows());
  for (size_t i = 0; i < all.size(); ++i) all[i] = i;
  Rng sub(1);
  CHECK(StratifiedSubsample(d.labels, all, 1.0, sub) == all);
}

TEST_CASE("asyncea: offspring finishing before the last initial members keeps the cap") {
  auto cfg = Scripted(SearchAlgorithm::kAsyncEa, 0);
  cfg.population_size = 5;
  AsyncEaStrategy ea(Space(), cfg);
  std::vector<Job> initial;
  for (int i = 0; i < 5; ++i) initial.push_back(*ea.Next());
  ea.Complete(initial[0], Scored(0.5));
  const Job offspring = *ea.Next();
  ea.Complete(offspring, Scored(0.9));
  for (int i = 1; i < 5; ++i) ea.Complete(initial[static_cast<size_t>(i)], Scored(0.1 * i));
  CHECK(ea.population().size() == 5);
  CHECK(ea.Incumbent()->mean_score == 0.9);
}
