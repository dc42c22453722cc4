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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>

#include "imbal/estimators.hpp"
#include "imbal/metrics.hpp"
#include "imbal/preprocess.hpp"
#include "support.hpp"

using namespace imbal;
using testing::CodeOf;
using testing::FromRows;
using testing::Gaussians;

namespace {

double TrainingBalancedAccuracy(const FittedModel& m, const Dataset& d) {
  const auto pred = m.Predict(d.features);
  return BalancedAccuracy(Confusion(d.labels, pred));
}

EstimatorSpec Spec(EstimatorKind kind) {
  EstimatorSpec s;
  s.kind = kind;
  return s;
}

Matrix Grid(double lo, double hi, size_t steps) {
  Matrix g(0, 2);
  for (size_t i = 0; i < steps; ++i) {
    for (size_t j = 0; j < steps; ++j) {
      const double a = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
      const double b = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(steps - 1);
      g.AppendRow(std::vector<double>{a, b});
    }
  }
  return g;
}

std::map<int, size_t> CountLabels(const std::vector<int>& labels, const std::vector<size_t>& rows) {
  std::map<int, size_t> c;
  for (size_t r : rows) ++c[labels[r]];
  return c;
}

const std::vector<EstimatorKind> kAllKinds = {
    EstimatorKind::kDecisionTree,       EstimatorKind::kRandomForest,
    EstimatorKind::kKNeighbors,         EstimatorKind::kLogisticRegression,
    EstimatorKind::kGaussianNb,         EstimatorKind::kDecisionStump,
    EstimatorKind::kBalancedRandomForest, EstimatorKind::kBalancedBagging,
    EstimatorKind::kRusBoost};

}  // namespace

TEST_CASE("decision tree fits separable data and knn(1) recalls its training labels") {
  const auto d = Gaussians({40, 15}, 2, 8.0, 1);
  Rng rng(1);
  CHECK(TrainingBalancedAccuracy(*Fit(Spec(EstimatorKind::kDecisionTree), d, rng), d) == 1.0);

  const auto noisy = Gaussians({40, 15, 10}, 3, 0.5, 2);
  auto knn = Spec(EstimatorKind::kKNeighbors);
  knn.n_neighbors = 1;
  CHECK(Fit(knn, noisy, rng)->Predict(noisy.features) == noisy.labels);
}

TEST_CASE("fit: error paths") {
  Rng rng(1);
  const auto single = FromRows({{0}, {1}, {2}}, {0, 0, 0});
  CHECK(CodeOf([&] { Fit(EstimatorSpec{}, single, rng); }) == ErrorCode::kInvalidArgument);
  auto bad = Spec(EstimatorKind::kRandomForest);
  bad.max_features = 1.5;
  const auto d = Gaussians({5, 5}, 2, 1.0, 1);
  CHECK(CodeOf([&] { Fit(bad, d, rng); }) == ErrorCode::kDomain);
  bad.max_features = 1.01;
  CHECK_NOTHROW(Fit(bad, d, rng));
}

TEST_CASE("logistic regression: finite differences and stationarity") {
  Rng gen(3);
  for (int trial = 0; trial < 20; ++trial) {
    const size_t n = 6 + gen.Below(10), dim = 1 + gen.Below(4), k = 2 + gen.Below(3);
    Matrix x(n, dim);
    std::vector<int> cls(n);
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < dim; ++j) x(i, j) = gen.Normal();
      cls[i] = static_cast<int>(gen.Below(k));
    }
    std::vector<double> params(k * (dim + 1));
    for (double& p : params) p = gen.Normal();
    const double c = 0.1 + 2.0 * gen.Uniform01();
    std::vector<double> grad;
    LogisticObjective(x, cls, k, c, params, &grad);
    for (size_t i = 0; i < params.size(); ++i) {
      const double h = 1e-5;
      auto plus = params, minus = params;
      plus[i] += h;
      minus[i] -= h;
      const double fd = (LogisticObjective(x, cls, k, c, plus, nullptr) -
                         LogisticObjective(x, cls, k, c, minus, nullptr)) / (2 * h);
      CHECK(std::abs(fd - grad[i]) <= 1e-5 * std::max(1.0, std::abs(grad[i])));
    }
  }

  const auto d = Gaussians({30, 20, 10}, 3, 1.0, 4);
  Rng rng(1);
  const auto model = Fit(Spec(EstimatorKind::kLogisticRegression), d, rng);
  const auto params = LogisticParameters(*model);
  std::vector<int> cls(d.labels.begin(), d.labels.end());
  std::vector<double> grad;
  LogisticObjective(d.features, cls, 3, 1.0, params, &grad);
  double norm = 0.0;
  for (double g : grad) norm += g * g;
  CHECK(std::sqrt(norm) < 1e-6);
}

TEST_CASE("every estimator: label dictionary, score rows, determinism and JSON round trip") {
  const auto d = Gaussians({50, 20, 8}, 3, 1.5, 5);
  const auto relabeled = [&] {
    auto r = d;
    for (int& l : r.labels) l = l == 2 ? 0 : l + 1;
    return r;
  }();
  for (auto kind : kAllKinds) {
    CAPTURE(EstimatorKindName(kind));
    auto spec = Spec(kind);
    spec.n_estimators = 10;
    Rng r1(9), r2(9);
    const auto a = Fit(spec, d, r1);
    const auto b = Fit(spec, d, r2);
    CHECK(a->ToJson() == b->ToJson());
    CHECK(a->classes() == std::vector<int>{0, 1, 2});
    const auto scores = a->PredictScores(d.features);
    const auto pred = a->Predict(d.features);
    for (size_t i = 0; i < d.rows(); ++i) {
      double sum = 0.0;
      size_t arg = 0;
      for (size_t c = 0; c < 3; ++c) {
        CHECK(std::isfinite(scores(i, c)));
        sum += scores(i, c);
        if (scores(i, c) > scores(i, arg)) arg = c;
      }
      CHECK(std::abs(sum - 1.0) < 1e-9);
      CHECK(pred[i] == a->classes()[arg]);
    }
    const auto loaded = LoadModel(a->ToJson());
    CHECK(loaded->kind() == kind);
    CHECK(loaded->PredictScores(d.features) == scores);

    Rng r3(9);
    const auto m = Fit(spec, relabeled, r3);
    for (int l : m->Predict(d.features)) CHECK((l >= 0 && l <= 2));
  }
}

TEST_CASE("balanced random forest: balanced bootstraps and single-tree replay") {
  const auto d = Gaussians({60, 12}, 4, 1.0, 6);
  Rng boot(3);
  for (int t = 0; t < 20; ++t) {
    const auto rows = BalancedBootstrap(d.labels, boot);
    CHECK(CountLabels(d.labels, rows) == std::map<int, size_t>{{0, 12}, {1, 12}});
  }

  auto spec = Spec(EstimatorKind::kBalancedRandomForest);
  spec.n_estimators = 1;
  spec.max_features = 1.0;
  spec.criterion = Criterion::kEntropy;
  Rng rng(21);
  const auto forest = Fit(spec, d, rng);
  Rng child = Rng(21).Child(0);
  const auto rows = BalancedBootstrap(d.labels, child);
  EstimatorSpec tree;
  tree.criterion = Criterion::kEntropy;
  const auto single = FitTree(tree, d.features, d.labels, rows, {}, child);
  const auto probe = Grid(-3, 4, 15);
  Matrix probe4(probe.rows(), 4);
  for (size_t i = 0; i < probe.rows(); ++i) {
    probe4(i, 0) = probe(i, 0);
    probe4(i, 1) = probe(i, 1);
  }
  CHECK(forest->Predict(probe4) == single->Predict(probe4));
  CHECK(forest->Predict(d.features) == single->Predict(d.features));

  // 99/1 style: minority of two still yields balanced bootstraps of four.
  const auto skewed = Gaussians({99, 2}, 2, 3.0, 7);
  spec.n_estimators = 5;
  CHECK_NOTHROW(Fit(spec, skewed, rng));
  CHECK(BalancedBootstrap(skewed.labels, rng).size() == 4);
}

TEST_CASE("balanced bagging: undersampled bags and single-tree replay") {
  const auto d = Gaussians({70, 15, 9}, 3, 1.0, 8);
  Rng r(4);
  for (int t = 0; t < 20; ++t) {
    const auto bag = RandomUndersample(d.labels, r);
    CHECK(CountLabels(d.labels, bag) == std::map<int, size_t>{{0, 9}, {1, 9}, {2, 9}});
    CHECK(std::is_sorted(bag.begin(), bag.end()));
    CHECK(std::adjacent_find(bag.begin(), bag.end()) == bag.end());
  }

  auto spec = Spec(EstimatorKind::kBalancedBagging);
  spec.n_estimators = 1;
  Rng rng(33);
  const auto bagging = Fit(spec, d, rng);
  Rng child = Rng(33).Child(0);
  const auto balanced = RandomUndersample(d.labels, child);
  std::vector<size_t> rows(balanced.size());
  for (auto& row : rows) row = balanced[static_cast<size_t>(child.Below(balanced.size()))];
  const auto single = FitTree(EstimatorSpec{}, d.features, d.labels, rows, {}, child);
  CHECK(bagging->PredictScores(d.features) == single->PredictScores(d.features));

  // Unanimous vote: an ensemble of trees fitted on pure separable data.
  const auto sep = Gaussians({30, 10}, 2, 20.0, 9);
  spec.n_estimators = 7;
  const auto ens = Fit(spec, sep, rng);
  CHECK(ens->Predict(sep.features) == sep.labels);
}

TEST_CASE("rusboost: separable first round, normalized weights, replay oracle") {
  const auto sep = Gaussians({40, 10}, 2, 20.0, 10);
  auto spec = Spec(EstimatorKind::kRusBoost);
  spec.n_estimators = 10;
  Rng rng(1);
  const auto perfect = Fit(spec, sep, rng);
  const auto rounds = BoostRounds(*perfect);
  REQUIRE(!rounds.empty());
  CHECK(rounds[0].error == 0.0);
  CHECK(perfect->Predict(sep.features) == sep.labels);

  const auto d = Gaussians({50, 20}, 2, 1.0, 11);
  spec.n_estimators = 2;
  spec.learning_rate = 0.7;
  spec.max_depth = 1;
  Rng r1(5);
  const auto model = Fit(spec, d, r1);
  for (const auto& round : BoostRounds(*model)) CHECK(std::abs(round.weight_sum - 1.0) < 1e-12);

  // Hand-rolled boosting with the same stream.
  Rng r2(5);
  std::vector<double> w(d.rows(), 1.0 / static_cast<double>(d.rows()));
  std::vector<std::unique_ptr<FittedModel>> learners;
  std::vector<double> alphas;
  EstimatorSpec stump;
  stump.max_depth = 1;
  while (learners.size() < 2) {
    const auto rows = RandomUndersample(d.labels, r2);
    auto learner = FitTree(stump, d.features, d.labels, rows, w, r2);
    const auto pred = learner->Predict(d.features);
    double err = 0.0;
    for (size_t i = 0; i < d.rows(); ++i) err += pred[i] != d.labels[i] ? w[i] : 0.0;
    if (err >= 0.5) continue;
    REQUIRE(err > 0.0);
    const double alpha = 0.7 * std::log((1 - err) / err);
    double total = 0.0;
    for (size_t i = 0; i < d.rows(); ++i) {
      if (pred[i] != d.labels[i]) w[i] *= std::exp(alpha);
      total += w[i];
    }
    for (double& v : w) v /= total;
    learners.push_back(std::move(learner));
    alphas.push_back(alpha);
  }
  const auto got = model->PredictScores(d.features);
  const double alpha_sum = alphas[0] + alphas[1];
  for (size_t i = 0; i < d.rows(); ++i) {
    double s1 = 0.0;
    for (size_t m = 0; m < 2; ++m) {
      if (learners[m]->Predict(Matrix(1, 2, {d.features(i, 0), d.features(i, 1)}))[0] == 1) s1 += alphas[m];
    }
    CHECK(got(i, 1) == doctest::Approx(s1 / alpha_sum).epsilon(1e-12));
  }

  // Training balanced accuracy never drops as rounds are added.
  const auto fixture = Gaussians({40, 15}, 2, 3.0, 12);
  double previous = 0.0;
  for (int rounds_n = 1; rounds_n <= 6; ++rounds_n) {
    spec.n_estimators = rounds_n;
    spec.learning_rate = 1.0;
    Rng rr(3);
    const double ba = TrainingBalancedAccuracy(*Fit(spec, fixture, rr), fixture);
    CHECK(ba >= previous - 1e-12);
    previous = ba;
  }
}

TEST_CASE("preprocessors") {
  Matrix x(4, 3, std::vector<double>{3, 4, 0, 0, 0, 0, 1, 1, 1, -2, 0, 2});
  PreprocessorSpec norm;
  const auto n = FitPreprocessor(norm, x).Transform(x);
  for (size_t i = 0; i < 4; ++i) {
    double s = 0.0;
    for (size_t j = 0; j < 3; ++j) s += n(i, j) * n(i, j);
    if (i == 1) {
      CHECK(s == 0.0);
    } else {
      CHECK(std::abs(std::sqrt(s) - 1.0) < 1e-12);
    }
  }
  CHECK(n(0, 0) == doctest::Approx(0.6));

  PreprocessorSpec bin;
  bin.kind = PreprocessorKind::kBinarizer;
  bin.threshold = 0.5;
  CHECK(FitPreprocessor(bin, x).Transform(x).data() ==
        std::vector<double>{1, 1, 0, 0, 0, 0, 1, 1, 1, 0, 0, 1});

  Matrix constant(3, 2, std::vector<double>{1, 7, 2, 7, 3, 7});
  PreprocessorSpec vt;
  vt.kind = PreprocessorKind::kVarianceThreshold;
  const auto vt_fit = FitPreprocessor(vt, constant);
  CHECK(vt_fit.kept() == std::vector<size_t>{0});
  CHECK(vt_fit.Transform(constant).cols() == 1);
  Matrix all_constant(2, 1, std::vector<double>{4, 4});
  CHECK_THROWS_AS(FitPreprocessor(vt, all_constant), Error);

  PreprocessorSpec poly;
  poly.kind = PreprocessorKind::kPolynomialFeatures;
  Matrix two(1, 2, std::vector<double>{2, 3});
  CHECK(FitPreprocessor(poly, two).Transform(two).data() == std::vector<double>{2, 3, 4, 6, 9});
}

TEST_CASE("pca: full-rank reconstruction, orthonormal components, rank truncation") {
  const auto d = Gaussians({40}, 4, 0.0, 13, 0);
  PreprocessorSpec pca;
  pca.kind = PreprocessorKind::kPca;
  pca.n_components = 4;
  const auto fit = FitPreprocessor(pca, d.features);
  const auto t = fit.Transform(d.features);
  const auto& w = fit.components();
  REQUIRE(w.rows() == 4);
  double worst = 0.0;
  for (size_t i = 0; i < d.rows(); ++i) {
    for (size_t j = 0; j < 4; ++j) {
      double r = fit.mean()[j];
      for (size_t c = 0; c < 4; ++c) r += t(i, c) * w(c, j);
      worst = std::max(worst, std::abs(r - d.features(i, j)));
    }
  }
  CHECK(worst < 1e-9);

  // Leading component matches an independent eigensolver up to sign.
  Eigen::MatrixXd m(d.rows(), 4);
  for (size_t i = 0; i < d.rows(); ++i) {
    for (size_t j = 0; j < 4; ++j) m(i, j) = d.features(i, j) - fit.mean()[j];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.transpose() * m);
  const Eigen::VectorXd top = es.eigenvectors().col(3);
  double dot = 0.0;
  for (size_t j = 0; j < 4; ++j) dot += top(j) * w(0, j);
  CHECK(std::abs(std::abs(dot) - 1.0) < 1e-9);

  Matrix rank1(5, 3);
  for (size_t i = 0; i < 5; ++i) {
    for (size_t j = 0; j < 3; ++j) rank1(i, j) = static_cast<double>(i) * static_cast<double>(j + 1);
  }
  pca.n_components = 3;
  CHECK(FitPreprocessor(pca, rank1).components().rows() == 1);
}

TEST_CASE("preprocessors: transforms ignore the other rows of the batch") {
  const auto train = Gaussians({30}, 3, 0.0, 14, 0);
  const auto test = Gaussians({10}, 3, 0.0, 15, 0);
  for (auto kind : {PreprocessorKind::kNormalizer, PreprocessorKind::kBinarizer,
                    PreprocessorKind::kVarianceThreshold, PreprocessorKind::kPca,
                    PreprocessorKind::kPolynomialFeatures}) {
    PreprocessorSpec s;
    s.kind = kind;
    const auto fit = FitPreprocessor(s, train.features);
    const auto batch = fit.Transform(test.features);
    for (size_t i = 0; i < test.rows(); ++i) {
      const auto one = fit.Transform(test.features.SelectRows(std::vector<size_t>{i}));
      CHECK(std::equal(one.row(0).begin(), one.row(0).end(), batch.row(i).begin()));
    }
  }
}
