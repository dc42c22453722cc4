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

#include "imbal/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "imbal/error.hpp"

namespace imbal {

void Dataset::Validate() const {
  if (features.rows() != labels.size()) {
    Fail(ErrorCode::kInvalidArgument, "feature rows do not match label count");
  }
  if (!columns.empty() && columns.size() != features.cols()) {
    Fail(ErrorCode::kInvalidArgument, "column metadata does not match feature width");
  }
  for (int label : labels) {
    if (label < 0 || static_cast<size_t>(label) >= label_names.size()) {
      Fail(ErrorCode::kInvalidArgument, "label code outside label dictionary");
    }
  }
  for (double v : features.data()) {
    if (std::isnan(v)) Fail(ErrorCode::kInvalidArgument, "NaN in features");
  }
}

Dataset Dataset::Subset(std::span<const size_t> indices) const {
  Dataset out;
  out.name = name;
  out.features = features.SelectRows(indices);
  out.labels.reserve(indices.size());
  for (size_t i : indices) out.labels.push_back(labels[i]);
  out.label_names = label_names;
  out.columns = columns;
  return out;
}

Dataset Dataset::WithRows(Matrix new_features, std::vector<int> new_labels) const {
  Dataset out;
  out.name = name;
  out.features = std::move(new_features);
  out.labels = std::move(new_labels);
  out.label_names = label_names;
  if (out.features.cols() == features.cols()) {
    out.columns = columns;
  } else {
    out.columns = NumericColumns(out.features.cols());
  }
  return out;
}

std::vector<ColumnMeta> NumericColumns(size_t d) {
  std::vector<ColumnMeta> cols(d);
  for (size_t j = 0; j < d; ++j) cols[j].name = "x" + std::to_string(j);
  return cols;
}

int ClassDistribution::majority_class() const {
  int best = -1;
  size_t best_count = 0;
  for (const auto& [cls, count] : counts) {
    if (best < 0 || count > best_count) {
      best = cls;
      best_count = count;
    }
  }
  return best;
}

int ClassDistribution::minority_class() const {
  int best = -1;
  size_t best_count = 0;
  for (const auto& [cls, count] : counts) {
    if (best < 0 || count < best_count) {
      best = cls;
      best_count = count;
    }
  }
  return best;
}

ClassDistribution ComputeClassDistribution(std::span<const int> labels) {
  ClassDistribution dist;
  for (int label : labels) ++dist.counts[label];
  if (dist.counts.empty()) return dist;
  dist.majority_size = dist.counts.at(dist.majority_class());
  dist.minority_size = dist.counts.at(dist.minority_class());
  dist.imbalance_ratio =
      static_cast<double>(dist.majority_size) / static_cast<double>(dist.minority_size);
  return dist;
}

ClassDistribution ClassDistributionFromSizes(size_t majority, size_t minority) {
  ClassDistribution dist;
  if (minority > majority) std::swap(majority, minority);
  dist.counts[0] = majority;
  if (minority > 0) dist.counts[1] = minority;
  dist.majority_size = majority;
  dist.minority_size = minority;
  dist.imbalance_ratio = minority == 0 ? INFINITY
                                       : static_cast<double>(majority) /
                                             static_cast<double>(minority);
  return dist;
}

std::vector<size_t> FoldPlan::TrainIndices(int fold) const {
  std::vector<size_t> out;
  for (size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] != fold) out.push_back(i);
  }
  return out;
}

std::vector<size_t> FoldPlan::ValidationIndices(int fold) const {
  std::vector<size_t> out;
  for (size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] == fold) out.push_back(i);
  }
  return out;
}

namespace {

// Row indices grouped by class code, in ascending code order.
std::map<int, std::vector<size_t>> GroupByClass(std::span<const int> labels,
                                                std::span<const size_t> indices) {
  std::map<int, std::vector<size_t>> groups;
  for (size_t i : indices) groups[labels[i]].push_back(i);
  return groups;
}

std::vector<size_t> Iota(size_t n) {
  std::vector<size_t> v(n);
  for (size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

}  // namespace

FoldPlan StratifiedFolds(std::span<const int> labels, int k, Rng& rng) {
  if (k < 2) Fail(ErrorCode::kInvalidArgument, "fold count must be at least 2");
  if (static_cast<size_t>(k) > labels.size()) {
    Fail(ErrorCode::kInvalidArgument, "fold count exceeds number of rows");
  }
  FoldPlan plan;
  plan.k = k;
  plan.assignments.assign(labels.size(), -1);
  const auto all = Iota(labels.size());
  size_t position = 0;
  for (auto& [cls, members] : GroupByClass(labels, all)) {
    rng.Shuffle(members);
    for (size_t idx : members) {
      plan.assignments[idx] = static_cast<int>(position % static_cast<size_t>(k));
      ++position;
    }
  }
  return plan;
}

std::vector<size_t> StratifiedSubsample(std::span<const int> labels,
                                        std::span<const size_t> indices, double fraction,
                                        Rng& rng) {
  if (fraction >= 1.0) return {indices.begin(), indices.end()};
  if (fraction <= 0.0) Fail(ErrorCode::kInvalidArgument, "subsample fraction must be positive");
  std::vector<size_t> out;
  for (auto& [cls, members] : GroupByClass(labels, indices)) {
    size_t keep = static_cast<size_t>(std::llround(fraction * static_cast<double>(members.size())));
    keep = std::clamp<size_t>(keep, 1, members.size());
    auto picks = rng.SampleWithoutReplacement(members.size(), keep);
    std::sort(picks.begin(), picks.end());
    for (size_t p : picks) out.push_back(members[p]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::pair<std::vector<size_t>, std::vector<size_t>> StratifiedHoldout(
    std::span<const int> labels, double test_fraction, Rng& rng) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "test fraction must lie in (0, 1)");
  }
  std::vector<size_t> train, test;
  const auto all = Iota(labels.size());
  for (auto& [cls, members] : GroupByClass(labels, all)) {
    rng.Shuffle(members);
    size_t n_test = static_cast<size_t>(std::llround(test_fraction * static_cast<double>(members.size())));
    if (members.size() >= 2) n_test = std::clamp<size_t>(n_test, 1, members.size() - 1);
    else n_test = 0;
    for (size_t i = 0; i < members.size(); ++i) {
      (i < n_test ? test : train).push_back(members[i]);
    }
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {train, test};
}

}  // namespace imbal
