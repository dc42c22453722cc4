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

#ifndef IMBAL_ESTIMATORS_HPP_
#define IMBAL_ESTIMATORS_HPP_

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "imbal/cancel.hpp"
#include "imbal/dataset.hpp"
#include "imbal/rng.hpp"

namespace imbal {

enum class EstimatorKind {
  kDecisionTree,
  kRandomForest,
  kKNeighbors,
  kLogisticRegression,
  kGaussianNb,
  kDecisionStump,
  kBalancedRandomForest,
  kBalancedBagging,
  kRusBoost,
};

enum class Criterion { kGini, kEntropy };

const char* EstimatorKindName(EstimatorKind kind);

// Flat hyperparameter record; each kind reads its own subset.
struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::kDecisionTree;

  // Trees and forests.
  Criterion criterion = Criterion::kGini;
  int max_depth = 0;  // 0 = unlimited
  int min_samples_split = 2;
  int min_samples_leaf = 1;
  double max_features = 1.0;  // fraction; values above 1 clamp to 1
  double min_impurity_decrease = 0.0;
  int n_estimators = 100;
  bool bootstrap = true;
  double max_samples = 1.0;
  double learning_rate = 1.0;

  // k-nearest neighbors.
  int n_neighbors = 5;
  bool distance_weights = false;
  int p = 2;

  // Logistic regression inverse regularization strength.
  double c = 1.0;

  // Structural sanity (positive counts, fractions in (0, 1.01]).
  void Validate() const;
};

// A trained classifier. Scores are per model class (classes() order,
// ascending label code). Predict returns the argmax, ties to the lowest code.
class FittedModel {
 public:
  virtual ~FittedModel() = default;

  virtual EstimatorKind kind() const = 0;
  const std::vector<int>& classes() const { return classes_; }

  virtual Matrix PredictScores(const Matrix& x) const = 0;
  std::vector<int> Predict(const Matrix& x) const;

  // Versioned JSON document; learned arrays are base64 of little-endian
  // doubles / int32.
  virtual std::string ToJson() const = 0;

 protected:
  explicit FittedModel(std::vector<int> classes) : classes_(std::move(classes)) {}

 private:
  std::vector<int> classes_;
};

std::unique_ptr<FittedModel> Fit(const EstimatorSpec& spec, const Dataset& d, Rng& rng,
                                 const CancelToken& cancel = CancelToken::None());

std::unique_ptr<FittedModel> LoadModel(const std::string& json_text);

// Building blocks, public so ensembles can be replayed exactly.

// Rows for one balanced bootstrap: for each class in ascending code order,
// minority_size draws with replacement from that class's rows.
std::vector<size_t> BalancedBootstrap(std::span<const int> labels, Rng& rng);

// Random undersampling to the minority size, without replacement, classes in
// ascending code order; the returned rows are sorted.
std::vector<size_t> RandomUndersample(std::span<const int> labels, Rng& rng);

// CART tree on the given rows (duplicates allowed). `weights` is empty or one
// weight per row of `x`. Splits sample max(1, floor(max_features * d))
// candidate features per node.
std::unique_ptr<FittedModel> FitTree(const EstimatorSpec& spec, const Matrix& x,
                                     std::span<const int> labels, std::span<const size_t> rows,
                                     std::span<const double> weights, Rng& rng,
                                     const CancelToken& cancel = CancelToken::None());

// Multinomial logistic objective (mean cross-entropy + ||W||^2 / (2 C n),
// intercepts unpenalized). params is row-major (classes x (d + 1)) with the
// intercept last. Writes the gradient when `grad` is non-null.
double LogisticObjective(const Matrix& x, std::span<const int> class_index, size_t num_classes,
                         double c, std::span<const double> params, std::vector<double>* grad);

// Parameters of a fitted logistic regression model in the layout above.
std::vector<double> LogisticParameters(const FittedModel& model);

// Per-round record of a RUSBoost fit.
struct BoostRound {
  double error = 0.0;
  double alpha = 0.0;
  int attempts = 0;
  double weight_sum = 0.0;  // after normalization
};
std::vector<BoostRound> BoostRounds(const FittedModel& model);

}  // namespace imbal

#endif  // IMBAL_ESTIMATORS_HPP_
