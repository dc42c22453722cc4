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

#include "imbal/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "imbal/error.hpp"

namespace imbal {

std::string MetricName(MetricId id) {
  switch (id) {
    case MetricId::kBalancedAccuracy: return "balanced_accuracy";
    case MetricId::kGMean: return "g_mean";
    case MetricId::kF1Macro: return "f1_macro";
    case MetricId::kSensitivity: return "sensitivity";
  }
  return "unknown";
}

MetricId ParseMetric(const std::string& name) {
  if (name == "balanced_accuracy") return MetricId::kBalancedAccuracy;
  if (name == "g_mean") return MetricId::kGMean;
  if (name == "f1_macro") return MetricId::kF1Macro;
  if (name == "sensitivity") return MetricId::kSensitivity;
  Fail(ErrorCode::kInvalidArgument, "unknown metric '" + name + "'");
}

size_t ConfusionMatrix::total() const {
  size_t t = 0;
  for (const auto& row : counts) {
    for (size_t c : row) t += c;
  }
  return t;
}

size_t ConfusionMatrix::row_sum(size_t i) const {
  size_t s = 0;
  for (size_t c : counts[i]) s += c;
  return s;
}

size_t ConfusionMatrix::col_sum(size_t j) const {
  size_t s = 0;
  for (const auto& row : counts) s += row[j];
  return s;
}

std::optional<size_t> ConfusionMatrix::index_of(int cls) const {
  auto it = std::lower_bound(classes.begin(), classes.end(), cls);
  if (it == classes.end() || *it != cls) return std::nullopt;
  return static_cast<size_t>(it - classes.begin());
}

ConfusionMatrix Confusion(std::span<const int> y_true, std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size()) {
    Fail(ErrorCode::kInvalidArgument, "label vectors differ in length");
  }
  if (y_true.empty()) Fail(ErrorCode::kInvalidArgument, "cannot score zero samples");
  std::set<int> seen(y_true.begin(), y_true.end());
  seen.insert(y_pred.begin(), y_pred.end());
  ConfusionMatrix cm;
  cm.classes.assign(seen.begin(), seen.end());
  cm.counts.assign(cm.classes.size(), std::vector<size_t>(cm.classes.size(), 0));
  for (size_t i = 0; i < y_true.size(); ++i) {
    ++cm.counts[*cm.index_of(y_true[i])][*cm.index_of(y_pred[i])];
  }
  return cm;
}

namespace {

void RequireNonEmpty(const ConfusionMatrix& cm) {
  if (cm.classes.empty() || cm.total() == 0) Fail(ErrorCode::kInvalidArgument, "empty confusion matrix");
}

std::vector<double> Recalls(const ConfusionMatrix& cm) {
  std::vector<double> recalls;
  for (size_t i = 0; i < cm.classes.size(); ++i) {
    const size_t support = cm.row_sum(i);
    if (support == 0) continue;
    recalls.push_back(static_cast<double>(cm.counts[i][i]) / static_cast<double>(support));
  }
  return recalls;
}

}  // namespace

double BalancedAccuracy(const ConfusionMatrix& cm) {
  RequireNonEmpty(cm);
  const auto recalls = Recalls(cm);
  double sum = 0.0;
  for (double r : recalls) sum += r;
  return sum / static_cast<double>(recalls.size());
}

double GMean(const ConfusionMatrix& cm) {
  RequireNonEmpty(cm);
  const auto recalls = Recalls(cm);
  double log_sum = 0.0;
  for (double r : recalls) {
    if (r == 0.0) return 0.0;
    log_sum += std::log(r);
  }
  return std::exp(log_sum / static_cast<double>(recalls.size()));
}

double F1Macro(const ConfusionMatrix& cm) {
  RequireNonEmpty(cm);
  double sum = 0.0;
  for (size_t i = 0; i < cm.classes.size(); ++i) {
    const double tp = static_cast<double>(cm.counts[i][i]);
    const double predicted = static_cast<double>(cm.col_sum(i));
    const double actual = static_cast<double>(cm.row_sum(i));
    const double precision = predicted > 0 ? tp / predicted : 0.0;
    const double recall = actual > 0 ? tp / actual : 0.0;
    sum += precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
  }
  return sum / static_cast<double>(cm.classes.size());
}

double Sensitivity(const ConfusionMatrix& cm, int positive) {
  RequireNonEmpty(cm);
  auto idx = cm.index_of(positive);
  if (!idx || cm.row_sum(*idx) == 0) {
    Fail(ErrorCode::kInvalidArgument, "positive class absent from true labels");
  }
  return static_cast<double>(cm.counts[*idx][*idx]) / static_cast<double>(cm.row_sum(*idx));
}

double Score(MetricId metric, const ConfusionMatrix& cm, int positive) {
  switch (metric) {
    case MetricId::kBalancedAccuracy: return BalancedAccuracy(cm);
    case MetricId::kGMean: return GMean(cm);
    case MetricId::kF1Macro: return F1Macro(cm);
    case MetricId::kSensitivity: return Sensitivity(cm, positive);
  }
  return 0.0;
}

}  // namespace imbal
