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

#ifndef IMBAL_METRICS_HPP_
#define IMBAL_METRICS_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace imbal {

enum class MetricId { kBalancedAccuracy, kGMean, kF1Macro, kSensitivity };

std::string MetricName(MetricId id);
MetricId ParseMetric(const std::string& name);

// counts(i, j) = samples of true class classes[i] predicted as classes[j].
// classes is the sorted union of labels seen in both vectors.
struct ConfusionMatrix {
  std::vector<int> classes;
  std::vector<std::vector<size_t>> counts;

  size_t total() const;
  size_t row_sum(size_t i) const;
  size_t col_sum(size_t j) const;
  // Position of a class code in `classes`, or nullopt.
  std::optional<size_t> index_of(int cls) const;
};

ConfusionMatrix Confusion(std::span<const int> y_true, std::span<const int> y_pred);

// Unweighted mean of per-class recall over classes with at least one true
// sample.
double BalancedAccuracy(const ConfusionMatrix& cm);

// Geometric mean of the same per-class recalls; 0 when any recall is 0.
double GMean(const ConfusionMatrix& cm);

// Unweighted mean of per-class F1 over all classes in the matrix. Precision
// or recall with an empty denominator counts as 0, as does F1 when P + R = 0.
double F1Macro(const ConfusionMatrix& cm);

// Recall of `positive`. Throws when the class has no true samples.
double Sensitivity(const ConfusionMatrix& cm, int positive);

// Dispatch. `positive` is used by sensitivity only.
double Score(MetricId metric, const ConfusionMatrix& cm, int positive);

}  // namespace imbal

#endif  // IMBAL_METRICS_HPP_
