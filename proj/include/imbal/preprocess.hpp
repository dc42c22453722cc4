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

#ifndef IMBAL_PREPROCESS_HPP_
#define IMBAL_PREPROCESS_HPP_

#include <string>
#include <vector>

#include "imbal/matrix.hpp"

namespace imbal {

enum class PreprocessorKind { kNormalizer, kBinarizer, kVarianceThreshold, kPca, kPolynomialFeatures };

const char* PreprocessorKindName(PreprocessorKind kind);

struct PreprocessorSpec {
  PreprocessorKind kind = PreprocessorKind::kNormalizer;
  double threshold = 0.0;  // binarizer, variance threshold
  int n_components = 2;    // pca
  int degree = 2;          // polynomial features
};

// Transformer state learned from a training matrix. Transform never updates
// the state.
class FittedPreprocessor {
 public:
  FittedPreprocessor() = default;

  const PreprocessorSpec& spec() const { return spec_; }
  size_t input_cols() const { return input_cols_; }

  Matrix Transform(const Matrix& x) const;

  // PCA state, exposed for inspection.
  const std::vector<double>& mean() const { return mean_; }
  const Matrix& components() const { return components_; }  // k x d, rows = eigenvectors
  // VarianceThreshold: retained columns.
  const std::vector<size_t>& kept() const { return kept_; }

 private:
  friend FittedPreprocessor FitPreprocessor(const PreprocessorSpec& spec, const Matrix& x);

  PreprocessorSpec spec_;
  size_t input_cols_ = 0;
  std::vector<double> mean_;
  Matrix components_;
  std::vector<size_t> kept_;
};

// Normalizer: rows scaled to unit L2 norm (zero rows unchanged).
// Binarizer: 1 where x > threshold else 0.
// VarianceThreshold: keep columns whose population variance exceeds the
//   threshold; fails when no column survives.
// PCA: project the centered data onto the leading eigenvectors of the
//   training covariance; n_components is truncated to the numerical rank.
// PolynomialFeatures(2): the inputs followed by all products x_i x_j, i <= j.
FittedPreprocessor FitPreprocessor(const PreprocessorSpec& spec, const Matrix& x);

}  // namespace imbal

#endif  // IMBAL_PREPROCESS_HPP_
