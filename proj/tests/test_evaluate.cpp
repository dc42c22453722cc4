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
#include <cstring>
#include <thread>

#include "imbal/evaluate.hpp"
#include "support.hpp"

using namespace imbal;
using testing::Gaussians;

namespace {

Dataset ConstantFeature(size_t majority, size_t minority) {
  std::vector<std::vector<double>> rows(majority + minority, std::vector<double>{0.0});
  std::vector<int> labels(majority, 0);
  labels.resize(majority + minority, 1);
  return testing::FromRows(rows, labels);
}

}  // namespace

TEST_CASE("budget clock") {
  BudgetClock clock(2.5);
  CHECK(clock.per_eval_cap() == 0.25);
  CHECK(clock.remaining() <= 2.5);
  BudgetClock tiny(0.01);
  std::this_thread::sleep_for(std::chrono::milliseconds(30));
  CHECK(tiny.remaining() == 0.0);
  CHECK(tiny.exhausted());
  CHECK(tiny.EvalDeadline() <= tiny.end());
  CHECK_THROWS_AS(BudgetClock(0.0), Error);
}

TEST_CASE("evaluate: majority predictor on 90/10 data scores 0.5 on every fold") {
  const auto d = ConstantFeature(90, 10);
  Rng fold_rng(1);
  const auto folds = StratifiedFolds(d, 5, fold_rng);
  Rng rng(2);
  const auto r = Evaluate(DefaultPipeline("DecisionTreeClassifier"), d, folds, EvalOptions{}, rng);
  REQUIRE(r.ok());
  CHECK(r.fold_scores == std::vector<double>(5, 0.5));
  CHECK(r.mean_score == 0.5);
}

TEST_CASE("evaluate: aggregation, determinism and metric choice") {
  const auto d = Gaussians({40, 10}, 2, 12.0, 3);
  Rng fold_rng(1);
  const auto folds = StratifiedFolds(d, 5, fold_rng);
  const auto p = ParsePipeline("SMOTE() >> DecisionTreeClassifier()");
  Rng r1(4), r2(4);
  const auto a = Evaluate(p, d, folds, EvalOptions{}, r1);
  const auto b = Evaluate(p, d, folds, EvalOptions{}, r2);
  REQUIRE(a.ok());
  CHECK(a.fold_scores == std::vector<double>(5, 1.0));
  CHECK(a.mean_score == 1.0);
  CHECK(a.fold_scores == b.fold_scores);
  CHECK(a.pipeline_text == p.ToText());
  CHECK(a.pipeline_id == p.Id());

  const auto noisy = Gaussians({60, 20}, 2, 1.0, 5);
  const auto nfolds = StratifiedFolds(noisy, 4, fold_rng);
  for (auto metric : {MetricId::kBalancedAccuracy, MetricId::kGMean, MetricId::kF1Macro,
                      MetricId::kSensitivity}) {
    EvalOptions opts;
    opts.metric = metric;
    Rng rr(6);
    const auto r = Evaluate(DefaultPipeline("GaussianNB"), noisy, nfolds, opts, rr);
    REQUIRE(r.ok());
    double sum = 0.0;
    for (double s : r.fold_scores) sum += s;
    CHECK(r.mean_score == doctest::Approx(sum / 4).epsilon(1e-15));
    CHECK(r.metric == metric);
  }
}

TEST_CASE("evaluate: resampling never touches validation rows") {
  const auto d = Gaussians({50, 8}, 3, 1.0, 7);
  Rng fold_rng(1);
  const auto folds = StratifiedFolds(d, 4, fold_rng);
  for (const char* text : {"SMOTE() >> GaussianNB()", "ADASYN() >> TomekLinks() >> GaussianNB()",
                           "ClusterCentroids(voting=soft) >> GaussianNB()"}) {
    EvalOptions opts;
    int observed = 0;
    opts.validation_observer = [&](int fold, const Dataset& validation) {
      ++observed;
      const auto rows = folds.ValidationIndices(fold);
      REQUIRE(validation.rows() == rows.size());
      for (size_t i = 0; i < rows.size(); ++i) {
        CHECK(validation.labels[i] == d.labels[rows[i]]);
        CHECK(std::memcmp(validation.features.row(i).data(), d.features.row(rows[i]).data(),
                          d.cols() * sizeof(double)) == 0);
      }
    };
    Rng rng(8);
    CHECK(Evaluate(ParsePipeline(text), d, folds, opts, rng).ok());
    CHECK(observed == 4);
  }
}

TEST_CASE("evaluate: timeout and error statuses sort below every ok result") {
  const auto big = Gaussians({1500, 500}, 20, 0.3, 9);
  Rng fold_rng(1);
  const auto folds = StratifiedFolds(big, 5, fold_rng);
  const auto slow = ParsePipeline(
      "PolynomialFeatures(degree=2) >> RandomForestClassifier(n_estimators=100, max_features=1.0)");
  Rng rng(1);
  const auto start = SteadyClock::now();
  const auto t = EvaluateWithCap(slow, big, folds, EvalOptions{}, 0.1, rng);
  const double elapsed = std::chrono::duration<double>(SteadyClock::now() - start).count();
  CHECK(t.status == EvalStatus::kTimeout);
  CHECK(std::isinf(t.mean_score));
  CHECK(t.mean_score < 0);
  CHECK(t.fold_scores.empty());
  CHECK(elapsed < 1.0);

  // Feature variances near 1e-4 fall below the threshold in every fold.
  const auto raw = Gaussians({30, 10}, 2, 0.01, 10);
  Matrix scaled = raw.features;
  for (double& v : scaled.data()) v *= 0.01;
  const auto d = raw.WithRows(scaled, raw.labels);
  Rng fr(2);
  const auto small_folds = StratifiedFolds(d, 3, fr);
  Rng r2(3);
  const auto e = Evaluate(ParsePipeline("VarianceThreshold(threshold=1.0) >> GaussianNB()"), d,
                          small_folds, EvalOptions{}, r2);
  CHECK(e.status == EvalStatus::kError);
  CHECK(!e.error.empty());
  CHECK(std::isinf(e.mean_score));

  EvaluationResult low, high;
  low.status = high.status = EvalStatus::kOk;
  low.mean_score = 0.1;
  high.mean_score = 0.9;
  std::vector<EvaluationResult> all{high, t, low, e};
  std::stable_sort(all.begin(), all.end(), WorseThan);
  CHECK_FALSE(all[0].ok());
  CHECK_FALSE(all[1].ok());
  CHECK(all[2].mean_score == 0.1);
  CHECK(all[3].mean_score == 0.9);
  CHECK_FALSE(WorseThan(t, e));
  CHECK_FALSE(WorseThan(e, t));
  CHECK(WorseThan(e, low));
  CHECK(WorseThan(low, high));
}

TEST_CASE("holdout: separable self-test, unseen test class, replay") {
  const auto d = Gaussians({30, 10}, 2, 15.0, 11);
  Rng rng(1);
  CHECK(HoldoutFinal(DefaultPipeline("DecisionTreeClassifier"), d, d, MetricId::kBalancedAccuracy, rng) ==
        1.0);

  auto test = Gaussians({5, 5, 5}, 2, 15.0, 12);
  const double ba = HoldoutFinal(DefaultPipeline("DecisionTreeClassifier"), d, test,
                                 MetricId::kBalancedAccuracy, rng);
  CHECK(ba == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  const auto train = Gaussians({40, 15}, 3, 1.0, 13);
  const auto holdout = Gaussians({20, 8}, 3, 1.0, 14);
  const auto p = ParsePipeline("SMOTE(k_neighbours=3) >> Normalizer() >> LogisticRegression()");
  Rng a(21), b(21);
  const double got = HoldoutFinal(p, train, holdout, MetricId::kGMean, a);
  const auto fitted = FitPipeline(p, train, b);
  const double expected = GMean(Confusion(holdout.labels, fitted.Predict(holdout.features)));
  CHECK(got == expected);
}

TEST_CASE("evaluation records and log") {
  EvaluationResult r;
  r.pipeline_id = "00000000000000ab";
  r.pipeline_text = "GaussianNB()";
  r.metric = MetricId::kF1Macro;
  r.fold_scores = {0.5, 0.75};
  r.mean_score = 0.625;
  r.status = EvalStatus::kOk;
  r.wall_clock = 1.5;
  r.rung = 1;
  r.resource = 1.0 / 3.0;
  r.config_id = 4;
  r.sequence = 9;
  const auto back = ResultFromJson(ResultToJson(r));
  CHECK(back.fold_scores == r.fold_scores);
  CHECK(back.mean_score == r.mean_score);
  CHECK(back.metric == r.metric);
  CHECK(back.resource == r.resource);
  CHECK(back.wall_clock == 1.5);
  CHECK(ResultToJson(r, false).find("wall_clock") == std::string::npos);
  CHECK_THROWS_AS(ResultFromJson("{"), Error);

  const auto dir = testing::TempDir("evaluation_log");
  const auto path = (dir / "evals.jsonl").string();
  {
    EvaluationLog log(path);
    log.Append(r);
    EvaluationResult failed;
    failed.pipeline_text = "GaussianNB()";
    failed.error = "boom";
    log.Append(failed);
    // Flushed per line: readable while the log is still open.
    CHECK(ReadEvaluationLog(path).size() == 2);
  }
  const auto records = ReadEvaluationLog(path);
  CHECK(records[1].status == EvalStatus::kError);
  CHECK(std::isinf(records[1].mean_score));
}
