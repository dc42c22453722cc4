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

#include "imbal/preprocess.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "imbal/error.hpp"

namespace imbal {

const char* PreprocessorKindName(PreprocessorKind kind) {
  switch (kind) {
    case PreprocessorKind::kNormalizer: return "Normalizer";
    case PreprocessorKind::kBinarizer: return "Binarizer";
    case PreprocessorKind::kVarianceThreshold: return "VarianceThreshold";
    case PreprocessorKind::kPca: return "PCA";
    case PreprocessorKind::kPolynomialFeatures: return "PolynomialFeatures";
  }
  return "?";
}

FittedPreprocessor FitPreprocessor(const PreprocessorSpec& spec, const Matrix& x) {
  if (x.rows() == 0) Fail(ErrorCode::kInvalidArgument, "preprocessor needs at least one row");
  FittedPreprocessor out;
  out.spec_ = spec;
  out.input_cols_ = x.cols();
  const size_t n = x.rows();
  const size_t d = x.cols();
  switch (spec.kind) {
    case PreprocessorKind::kNormalizer:
    case PreprocessorKind::kBinarizer:
      break;
    case PreprocessorKind::kPolynomialFeatures:
      if (spec.degree != 2) Fail(ErrorCode::kDomain, "PolynomialFeatures supports degree=2 only");
      break;
    case PreprocessorKind::kVarianceThreshold: {
      for (size_t j = 0; j < d; ++j) {
        double mean = 0.0, acc = 0.0;
        for (size_t i = 0; i < n; ++i) mean += x(i, j);
        mean /= static_cast<double>(n);
        for (size_t i = 0; i < n; ++i) acc += (x(i, j) - mean) * (x(i, j) - mean);
        if (acc / static_cast<double>(n) > spec.threshold) out.kept_.push_back(j);
      }
      if (out.kept_.empty()) {
        Fail(ErrorCode::kRuntime, "no feature meets the variance threshold " + std::to_string(spec.threshold));
      }
      break;
    }
    case PreprocessorKind::kPca: {
      if (spec.n_components < 1) Fail(ErrorCode::kDomain, "n_components must be >= 1");
      Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
      for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < d; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x(i, j);
      }
      const Eigen::RowVectorXd mean = m.colwise().mean();
      m.rowwise() -= mean;
      const Eigen::MatrixXd cov = (m.transpose() * m) / static_cast<double>(std::max<size_t>(n - 1, 1));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
      const auto& values = solver.eigenvalues();    // ascending
      const auto& vectors = solver.eigenvectors();
      const double top = d > 0 ? std::max(values(static_cast<Eigen::Index>(d - 1)), 0.0) : 0.0;
      size_t rank = 0;
      for (size_t j = 0; j < d; ++j) {
        if (values(static_cast<Eigen::Index>(j)) > 1e-12 * std::max(top, 1e-300)) ++rank;
      }
      const size_t k = std::max<size_t>(1, std::min<size_t>(static_cast<size_t>(spec.n_components), rank));
      out.mean_.assign(mean.data(), mean.data() + d);
      out.components_ = Matrix(k, d);
      for (size_t c = 0; c < k; ++c) {
        const auto col = static_cast<Eigen::Index>(d - 1 - c);
        // Sign convention: largest-magnitude loading positive.
        Eigen::Index arg = 0;
        vectors.col(col).cwiseAbs().maxCoeff(&arg);
        const double sign = vectors(arg, col) < 0.0 ? -1.0 : 1.0;
        for (size_t j = 0; j < d; ++j) {
          out.components_(c, j) = sign * vectors(static_cast<Eigen::Index>(j), col);
        }
      }
      break;
    }
  }
  return out;
}

Matrix FittedPreprocessor::Transform(const Matrix& x) const {
  if (x.cols() != input_cols_) {
    Fail(ErrorCode::kInvalidArgument, std::string(PreprocessorKindName(spec_.kind)) +
                                          ": expected " + std::to_string(input_cols_) + " columns, got " +
                                          std::to_string(x.cols()));
  }
  const size_t n = x.rows();
  const size_t d = x.cols();
  switch (spec_.kind) {
    case PreprocessorKind::kNormalizer: {
      Matrix out = x;
      for (size_t i = 0; i < n; ++i) {
        double norm = 0.0;
        for (double v : out.row(i)) norm += v * v;
        norm = std::sqrt(norm);
        if (norm > 0.0) {
          for (double& v : out.row(i)) v /= norm;
        }
      }
      return out;
    }
    case PreprocessorKind::kBinarizer: {
      Matrix out = x;
      for (double& v : out.data()) v = v > spec_.threshold ? 1.0 : 0.0;
      return out;
    }
    case PreprocessorKind::kVarianceThreshold: {
      Matrix out(n, kept_.size());
      for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < kept_.size(); ++j) out(i, j) = x(i, kept_[j]);
      }
      return out;
    }
    case PreprocessorKind::kPca: {
      const size_t k = components_.rows();
      Matrix out(n, k);
      for (size_t i = 0; i < n; ++i) {
        for (size_t c = 0; c < k; ++c) {
          double acc = 0.0;
          for (size_t j = 0; j < d; ++j) acc += (x(i, j) - mean_[j]) * components_(c, j);
          out(i, c) = acc;
        }
      }
      return out;
    }
    case PreprocessorKind::kPolynomialFeatures: {
      const size_t width = d + d * (d + 1) / 2;
      Matrix out(n, width);
      for (size_t i = 0; i < n; ++i) {
        size_t col = 0;
        for (size_t j = 0; j < d; ++j) out(i, col++) = x(i, j);
        for (size_t a = 0; a < d; ++a) {
          for (size_t b = a; b < d; ++b) out(i, col++) = x(i, a) * x(i, b);
        }
      }
      return out;
    }
  }
  Fail(ErrorCode::kInvalidArgument, "unknown preprocessor");
}

}  // namespace imbal
