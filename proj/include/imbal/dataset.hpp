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

#ifndef IMBAL_DATASET_HPP_
#define IMBAL_DATASET_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "imbal/matrix.hpp"
#include "imbal/rng.hpp"

namespace imbal {

enum class ColumnKind { kNumeric, kCategorical };

struct ColumnMeta {
  std::string name;
  ColumnKind kind = ColumnKind::kNumeric;
  // For categorical columns: category names indexed by code.
  std::vector<std::string> categories;
  // Cells that were missing in the source file before imputation.
  size_t missing_count = 0;

  bool operator==(const ColumnMeta&) const = default;
};

// Numeric feature matrix plus integer-coded labels.
//
// Invariants (enforced by Validate()):
//   features.rows() == labels.size()
//   every label code indexes label_names
//   no NaN in features
struct Dataset {
  std::string name;
  Matrix features;
  std::vector<int> labels;
  std::vector<std::string> label_names;
  std::vector<ColumnMeta> columns;

  size_t rows() const { return labels.size(); }
  size_t cols() const { return features.cols(); }
  size_t num_classes() const { return label_names.size(); }

  void Validate() const;

  // Rows in the given order; metadata and label dictionary are kept.
  Dataset Subset(std::span<const size_t> indices) const;

  // Same metadata and label dictionary, new rows.
  Dataset WithRows(Matrix features, std::vector<int> labels) const;

  bool operator==(const Dataset&) const = default;
};

// Generic numeric column metadata for d columns named x0..x{d-1}.
std::vector<ColumnMeta> NumericColumns(size_t d);

struct ClassDistribution {
  std::map<int, size_t> counts;  // class code -> count (present classes only)
  size_t majority_size = 0;
  size_t minority_size = 0;
  double imbalance_ratio = 1.0;

  int majority_class() const;
  int minority_class() const;
};

ClassDistribution ComputeClassDistribution(std::span<const int> labels);
inline ClassDistribution ComputeClassDistribution(const Dataset& d) {
  return ComputeClassDistribution(d.labels);
}

// Distribution built from majority/minority sizes alone (e.g. from published
// dataset summaries); the two sizes are stored under class codes 0 and 1.
ClassDistribution ClassDistributionFromSizes(size_t majority, size_t minority);

struct FoldPlan {
  int k = 0;
  std::vector<int> assignments;

  std::vector<size_t> TrainIndices(int fold) const;
  std::vector<size_t> ValidationIndices(int fold) const;
};

// Stratified k-fold assignment. Each class is shuffled and dealt round-robin,
// continuing the deal position across classes, so per-class fold counts
// differ by at most one and classes smaller than k occupy distinct folds.
FoldPlan StratifiedFolds(std::span<const int> labels, int k, Rng& rng);
inline FoldPlan StratifiedFolds(const Dataset& d, int k, Rng& rng) {
  return StratifiedFolds(d.labels, k, rng);
}

// Stratified subsample of `indices` keeping round(fraction * class count)
// rows per class (at least one per present class). fraction >= 1 returns
// `indices` unchanged.
std::vector<size_t> StratifiedSubsample(std::span<const int> labels,
                                        std::span<const size_t> indices, double fraction,
                                        Rng& rng);

// Stratified train/test split by row index; test_fraction in (0, 1).
std::pair<std::vector<size_t>, std::vector<size_t>> StratifiedHoldout(
    std::span<const int> labels, double test_fraction, Rng& rng);

}  // namespace imbal

#endif  // IMBAL_DATASET_HPP_
