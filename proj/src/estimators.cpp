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

#include "imbal/estimators.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <limits>
#include <map>
#include <numeric>

#include "codec.hpp"
#include "imbal/error.hpp"
#include "imbal/neighbors.hpp"

namespace imbal {

using nlohmann::json;

const char* EstimatorKindName(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kDecisionTree: return "DecisionTreeClassifier";
    case EstimatorKind::kRandomForest: return "RandomForestClassifier";
    case EstimatorKind::kKNeighbors: return "KNeighborsClassifier";
    case EstimatorKind::kLogisticRegression: return "LogisticRegression";
    case EstimatorKind::kGaussianNb: return "GaussianNB";
    case EstimatorKind::kDecisionStump: return "DecisionStump";
    case EstimatorKind::kBalancedRandomForest: return "BalancedRandomForestClassifier";
    case EstimatorKind::kBalancedBagging: return "BalancedBaggingClassifier";
    case EstimatorKind::kRusBoost: return "RUSBoostClassifier";
  }
  return "?";
}

namespace {

EstimatorKind KindFromName(const std::string& name) {
  for (int k = 0; k <= static_cast<int>(EstimatorKind::kRusBoost); ++k) {
    if (name == EstimatorKindName(static_cast<EstimatorKind>(k))) return static_cast<EstimatorKind>(k);
  }
  Fail(ErrorCode::kParse, "unknown model kind '" + name + "'");
}

}  // namespace

void EstimatorSpec::Validate() const {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) Fail(ErrorCode::kDomain, what);
  };
  need(max_depth >= 0, "max_depth must be >= 0");
  need(min_samples_split >= 2, "min_samples_split must be >= 2");
  need(min_samples_leaf >= 1, "min_samples_leaf must be >= 1");
  need(max_features > 0.0 && max_features <= 1.01, "max_features must lie in (0, 1.01]");
  need(max_samples > 0.0 && max_samples <= 1.01, "max_samples must lie in (0, 1.01]");
  need(min_impurity_decrease >= 0.0, "min_impurity_decrease must be >= 0");
  need(n_estimators >= 1, "n_estimators must be >= 1");
  need(learning_rate > 0.0, "learning_rate must be > 0");
  need(n_neighbors >= 1, "n_neighbors must be >= 1");
  need(p == 1 || p == 2, "p must be 1 or 2");
  need(c > 0.0, "C must be > 0");
}

std::vector<int> FittedModel::Predict(const Matrix& x) const {
  const Matrix scores = PredictScores(x);
  std::vector<int> out(x.rows());
  for (size_t i = 0; i < x.rows(); ++i) {
    auto row = scores.row(i);
    out[i] = classes_[static_cast<size_t>(std::max_element(row.begin(), row.end()) - row.begin())];
  }
  return out;
}

namespace {

std::vector<int> SortedClasses(std::span<const int> labels, std::span<const size_t> rows) {
  std::vector<int> classes;
  for (size_t r : rows) classes.push_back(labels[r]);
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  return classes;
}

std::vector<int> SortedClasses(std::span<const int> labels) {
  std::vector<size_t> rows(labels.size());
  std::iota(rows.begin(), rows.end(), size_t{0});
  return SortedClasses(labels, rows);
}

// label code -> index into `classes`, -1 for unknown codes.
std::vector<int> IndexOf(const std::vector<int>& classes) {
  std::vector<int> out(classes.empty() ? 0 : static_cast<size_t>(classes.back()) + 1, -1);
  for (size_t i = 0; i < classes.size(); ++i) out[static_cast<size_t>(classes[i])] = static_cast<int>(i);
  return out;
}

size_t ArgMax(std::span<const double> v) {
  return static_cast<size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

json Header(const FittedModel& model) {
  return json{{"format", "imbal.model"}, {"version", 1}, {"kind", EstimatorKindName(model.kind())},
              {"classes", model.classes()}};
}

std::vector<int32_t> ToInt32(const std::vector<int>& v) { return {v.begin(), v.end()}; }
std::vector<int> FromInt32(const std::vector<int32_t>& v) { return {v.begin(), v.end()}; }

// ---------------------------------------------------------------------------
// Decision tree

struct TreeArrays {
  size_t num_classes = 0;
  std::vector<int> feature;  // -1 marks a leaf
  std::vector<double> threshold;
  std::vector<int> left;
  std::vector<int> right;
  std::vector<double> value;  // node-major class distributions

  std::span<const double> Leaf(std::span<const double> row) const {
    size_t node = 0;
    while (feature[node] >= 0) {
      node = static_cast<size_t>(row[static_cast<size_t>(feature[node])] <= threshold[node]
                                     ? left[node]
                                     : right[node]);
    }
    return {value.data() + node * num_classes, num_classes};
  }

  json ToJson() const {
    return json{{"nodes", feature.size()},
                {"feature", codec::EncodeInts(ToInt32(feature))},
                {"threshold", codec::EncodeDoubles(threshold)},
                {"left", codec::EncodeInts(ToInt32(left))},
                {"right", codec::EncodeInts(ToInt32(right))},
                {"value", codec::EncodeDoubles(value)}};
  }

  static TreeArrays FromJson(const json& j, size_t num_classes) {
    TreeArrays t;
    t.num_classes = num_classes;
    t.feature = FromInt32(codec::DecodeInts(j.at("feature").get<std::string>()));
    t.threshold = codec::DecodeDoubles(j.at("threshold").get<std::string>());
    t.left = FromInt32(codec::DecodeInts(j.at("left").get<std::string>()));
    t.right = FromInt32(codec::DecodeInts(j.at("right").get<std::string>()));
    t.value = codec::DecodeDoubles(j.at("value").get<std::string>());
    const size_t n = t.feature.size();
    if (n == 0 || t.threshold.size() != n || t.left.size() != n || t.right.size() != n ||
        t.value.size() != n * num_classes) {
      Fail(ErrorCode::kSchema, "inconsistent tree arrays");
    }
    for (size_t i = 0; i < n; ++i) {
      if (t.feature[i] >= 0 && (t.left[i] <= static_cast<int>(i) || t.right[i] <= static_cast<int>(i) ||
                                t.left[i] >= static_cast<int>(n) || t.right[i] >= static_cast<int>(n))) {
        Fail(ErrorCode::kSchema, "tree child index out of range");
      }
    }
    return t;
  }
};

double Impurity(Criterion criterion, std::span<const double> counts, double total) {
  if (total <= 0.0) return 0.0;
  double acc = 0.0;
  if (criterion == Criterion::kGini) {
    for (double c : counts) acc += (c / total) * (c / total);
    return 1.0 - acc;
  }
  for (double c : counts) {
    if (c > 0.0) acc -= (c / total) * std::log2(c / total);
  }
  return acc;
}

class TreeBuilder {
 public:
  TreeBuilder(const EstimatorSpec& spec, const Matrix& x, std::span<const int> class_of_row,
              std::span<const double> weights, size_t num_classes, Rng& rng,
              const CancelToken& cancel)
      : spec_(spec),
        x_(x),
        class_of_row_(class_of_row),
        weights_(weights),
        num_classes_(num_classes),
        rng_(rng),
        cancel_(cancel) {
    tree_.num_classes = num_classes;
  }

  TreeArrays Build(std::vector<size_t> samples) {
    samples_ = std::move(samples);
    root_weight_ = 0.0;
    for (size_t s : samples_) root_weight_ += Weight(s);
    Grow(0, samples_.size(), 0);
    return std::move(tree_);
  }

 private:
  double Weight(size_t row) const { return weights_.empty() ? 1.0 : weights_[row]; }

  int NewNode() {
    tree_.feature.push_back(-1);
    tree_.threshold.push_back(0.0);
    tree_.left.push_back(-1);
    tree_.right.push_back(-1);
    tree_.value.resize(tree_.value.size() + num_classes_, 0.0);
    return static_cast<int>(tree_.feature.size()) - 1;
  }

  int Grow(size_t begin, size_t end, int depth) {
    cancel_.Check();
    const int node = NewNode();
    std::vector<double> counts(num_classes_, 0.0);
    double total = 0.0;
    for (size_t i = begin; i < end; ++i) {
      counts[static_cast<size_t>(class_of_row_[samples_[i]])] += Weight(samples_[i]);
      total += Weight(samples_[i]);
    }
    for (size_t c = 0; c < num_classes_; ++c) {
      tree_.value[static_cast<size_t>(node) * num_classes_ + c] =
          total > 0.0 ? counts[c] / total : 1.0 / static_cast<double>(num_classes_);
    }

    const size_t n = end - begin;
    const size_t min_leaf = static_cast<size_t>(spec_.min_samples_leaf);
    const double impurity = Impurity(spec_.criterion, counts, total);
    if ((spec_.max_depth > 0 && depth >= spec_.max_depth) ||
        n < static_cast<size_t>(spec_.min_samples_split) || n < 2 * min_leaf || impurity <= 0.0 ||
        total <= 0.0) {
      return node;
    }

    const size_t d = x_.cols();
    const double fraction = std::min(spec_.max_features, 1.0);
    const size_t k = std::max<size_t>(1, static_cast<size_t>(std::floor(fraction * static_cast<double>(d))));
    std::vector<size_t> features;
    if (k < d) {
      features = rng_.SampleWithoutReplacement(d, k);
      std::sort(features.begin(), features.end());
    } else {
      features.resize(d);
      std::iota(features.begin(), features.end(), size_t{0});
    }

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_gain = -std::numeric_limits<double>::infinity();
    std::vector<std::pair<double, size_t>> order(n);
    std::vector<double> left(num_classes_);
    std::vector<double> right(num_classes_);
    for (size_t f : features) {
      for (size_t i = 0; i < n; ++i) order[i] = {x_(samples_[begin + i], f), samples_[begin + i]};
      std::sort(order.begin(), order.end());
      if (order.front().first == order.back().first) continue;
      std::fill(left.begin(), left.end(), 0.0);
      right = counts;
      double w_left = 0.0;
      for (size_t i = 0; i + 1 < n; ++i) {
        const size_t row = order[i].second;
        const double w = Weight(row);
        left[static_cast<size_t>(class_of_row_[row])] += w;
        right[static_cast<size_t>(class_of_row_[row])] -= w;
        w_left += w;
        if (order[i].first == order[i + 1].first) continue;
        if (i + 1 < min_leaf || n - (i + 1) < min_leaf) continue;
        const double w_right = total - w_left;
        const double gain = impurity - (w_left / total) * Impurity(spec_.criterion, left, w_left) -
                            (w_right / total) * Impurity(spec_.criterion, right, w_right);
        if (gain > best_gain + 1e-12) {
          best_gain = gain;
          best_feature = static_cast<int>(f);
          double mid = 0.5 * (order[i].first + order[i + 1].first);
          if (!(mid < order[i + 1].first)) mid = order[i].first;
          best_threshold = mid;
        }
      }
    }
    if (best_feature < 0) return node;
    const double weighted_decrease = total / root_weight_ * best_gain;
    if (weighted_decrease + 1e-12 < spec_.min_impurity_decrease) return node;

    const auto mid = std::stable_partition(
        samples_.begin() + static_cast<std::ptrdiff_t>(begin),
        samples_.begin() + static_cast<std::ptrdiff_t>(end),
        [&](size_t row) { return x_(row, static_cast<size_t>(best_feature)) <= best_threshold; });
    const size_t split = static_cast<size_t>(mid - samples_.begin());
    tree_.feature[static_cast<size_t>(node)] = best_feature;
    tree_.threshold[static_cast<size_t>(node)] = best_threshold;
    const int l = Grow(begin, split, depth + 1);
    const int r = Grow(split, end, depth + 1);
    tree_.left[static_cast<size_t>(node)] = l;
    tree_.right[static_cast<size_t>(node)] = r;
    return node;
  }

  const EstimatorSpec& spec_;
  const Matrix& x_;
  std::span<const int> class_of_row_;
  std::span<const double> weights_;
  size_t num_classes_;
  Rng& rng_;
  const CancelToken& cancel_;
  std::vector<size_t> samples_;
  double root_weight_ = 0.0;
  TreeArrays tree_;
};

class TreeModel : public FittedModel {
 public:
  TreeModel(EstimatorKind kind, std::vector<int> classes, TreeArrays tree)
      : FittedModel(std::move(classes)), kind_(kind), tree_(std::move(tree)) {}

  EstimatorKind kind() const override { return kind_; }

  Matrix PredictScores(const Matrix& x) const override {
    Matrix out(x.rows(), classes().size());
    for (size_t i = 0; i < x.rows(); ++i) {
      auto leaf = tree_.Leaf(x.row(i));
      std::copy(leaf.begin(), leaf.end(), out.row(i).begin());
    }
    return out;
  }

  size_t PredictIndex(std::span<const double> row) const { return ArgMax(tree_.Leaf(row)); }

  std::string ToJson() const override {
    json j = Header(*this);
    j["tree"] = tree_.ToJson();
    return j.dump();
  }

  const TreeArrays& arrays() const { return tree_; }

 private:
  EstimatorKind kind_;
  TreeArrays tree_;
};

std::unique_ptr<TreeModel> FitTreeWithClasses(EstimatorKind kind, const EstimatorSpec& spec,
                                              const Matrix& x, std::span<const int> labels,
                                              std::span<const size_t> rows,
                                              std::span<const double> weights,
                                              const std::vector<int>& classes, Rng& rng,
                                              const CancelToken& cancel) {
  if (rows.empty()) Fail(ErrorCode::kInvalidArgument, "tree needs at least one sample");
  const auto index = IndexOf(classes);
  std::vector<int> class_of_row(labels.size(), 0);
  for (size_t r : rows) {
    const int code = labels[r];
    if (code < 0 || static_cast<size_t>(code) >= index.size() || index[static_cast<size_t>(code)] < 0) {
      Fail(ErrorCode::kInvalidArgument, "training label outside the class list");
    }
    class_of_row[r] = index[static_cast<size_t>(code)];
  }
  TreeBuilder builder(spec, x, class_of_row, weights, classes.size(), rng, cancel);
  return std::make_unique<TreeModel>(kind, classes,
                                     builder.Build(std::vector<size_t>(rows.begin(), rows.end())));
}

// ---------------------------------------------------------------------------
// Vote ensembles (random forest, balanced random forest, balanced bagging)

class VoteEnsemble : public FittedModel {
 public:
  VoteEnsemble(EstimatorKind kind, std::vector<int> classes,
               std::vector<std::unique_ptr<TreeModel>> members,
               std::vector<std::vector<size_t>> columns)
      : FittedModel(std::move(classes)),
        kind_(kind),
        members_(std::move(members)),
        columns_(std::move(columns)) {}

  EstimatorKind kind() const override { return kind_; }

  Matrix PredictScores(const Matrix& x) const override {
    Matrix out(x.rows(), classes().size());
    std::vector<double> projected;
    for (size_t m = 0; m < members_.size(); ++m) {
      for (size_t i = 0; i < x.rows(); ++i) {
        std::span<const double> row = x.row(i);
        if (!columns_[m].empty()) {
          projected.resize(columns_[m].size());
          for (size_t j = 0; j < columns_[m].size(); ++j) projected[j] = row[columns_[m][j]];
          row = projected;
        }
        out(i, members_[m]->PredictIndex(row)) += 1.0;
      }
    }
    for (double& v : out.data()) v /= static_cast<double>(members_.size());
    return out;
  }

  std::string ToJson() const override {
    json j = Header(*this);
    j["members"] = json::array();
    for (size_t m = 0; m < members_.size(); ++m) {
      j["members"].push_back(
          json{{"tree", members_[m]->arrays().ToJson()}, {"columns", columns_[m]}});
    }
    return j.dump();
  }

 private:
  EstimatorKind kind_;
  std::vector<std::unique_ptr<TreeModel>> members_;
  std::vector<std::vector<size_t>> columns_;  // empty = all columns
};

// ---------------------------------------------------------------------------
// RUSBoost (SAMME)

class BoostModel : public FittedModel {
 public:
  BoostModel(std::vector<int> classes, std::vector<std::unique_ptr<TreeModel>> members,
             std::vector<BoostRound> rounds)
      : FittedModel(std::move(classes)), members_(std::move(members)), rounds_(std::move(rounds)) {}

  EstimatorKind kind() const override { return EstimatorKind::kRusBoost; }

  Matrix PredictScores(const Matrix& x) const override {
    Matrix out(x.rows(), classes().size());
    double total = 0.0;
    for (size_t m = 0; m < members_.size(); ++m) {
      total += rounds_[m].alpha;
      for (size_t i = 0; i < x.rows(); ++i) out(i, members_[m]->PredictIndex(x.row(i))) += rounds_[m].alpha;
    }
    if (total > 0.0) {
      for (double& v : out.data()) v /= total;
    }
    return out;
  }

  std::string ToJson() const override {
    json j = Header(*this);
    j["members"] = json::array();
    std::vector<double> errors, alphas, sums;
    std::vector<int> attempts;
    for (size_t m = 0; m < members_.size(); ++m) {
      j["members"].push_back(json{{"tree", members_[m]->arrays().ToJson()}});
      errors.push_back(rounds_[m].error);
      alphas.push_back(rounds_[m].alpha);
      sums.push_back(rounds_[m].weight_sum);
      attempts.push_back(rounds_[m].attempts);
    }
    j["error"] = codec::EncodeDoubles(errors);
    j["alpha"] = codec::EncodeDoubles(alphas);
    j["weight_sum"] = codec::EncodeDoubles(sums);
    j["attempts"] = attempts;
    return j.dump();
  }

  const std::vector<BoostRound>& rounds() const { return rounds_; }

 private:
  std::vector<std::unique_ptr<TreeModel>> members_;
  std::vector<BoostRound> rounds_;
};

// ---------------------------------------------------------------------------
// k-nearest neighbors

class KnnModel : public FittedModel {
 public:
  KnnModel(std::vector<int> classes, Matrix train, std::vector<int> class_index, int k,
           bool distance_weights, int p)
      : FittedModel(std::move(classes)),
        train_(std::move(train)),
        class_index_(std::move(class_index)),
        k_(k),
        distance_weights_(distance_weights),
        p_(p) {}

  EstimatorKind kind() const override { return EstimatorKind::kKNeighbors; }

  Matrix PredictScores(const Matrix& x) const override {
    const NeighborIndex index(train_, p_);
    Matrix out(x.rows(), classes().size());
    for (size_t i = 0; i < x.rows(); ++i) {
      const auto nbs = index.Query(x.row(i), static_cast<size_t>(k_));
      const bool exact = distance_weights_ && nbs.front().distance == 0.0;
      double total = 0.0;
      for (const auto& nb : nbs) {
        double w = 1.0;
        if (distance_weights_) {
          if (exact) {
            w = nb.distance == 0.0 ? 1.0 : 0.0;
          } else {
            w = 1.0 / nb.distance;
          }
        }
        out(i, static_cast<size_t>(class_index_[nb.index])) += w;
        total += w;
      }
      for (double& v : out.row(i)) v /= total;
    }
    return out;
  }

  std::string ToJson() const override {
    json j = Header(*this);
    j["rows"] = train_.rows();
    j["cols"] = train_.cols();
    j["train"] = codec::EncodeDoubles(train_.data());
    j["class_index"] = codec::EncodeInts(ToInt32(class_index_));
    j["n_neighbors"] = k_;
    j["weights"] = distance_weights_ ? "distance" : "uniform";
    j["p"] = p_;
    return j.dump();
  }

 private:
  Matrix train_;
  std::vector<int> class_index_;
  int k_;
  bool distance_weights_;
  int p_;
};

// ---------------------------------------------------------------------------
// Logistic regression

constexpr double kLogisticTolerance = 1e-8;
constexpr int kLogisticMaxIter = 10000;

void Softmax(std::span<double> z) {
  const double m = *std::max_element(z.begin(), z.end());
  double s = 0.0;
  for (double& v : z) {
    v = std::exp(v - m);
    s += v;
  }
  for (double& v : z) v /= s;
}

class LogisticModel : public FittedModel {
 public:
  LogisticModel(std::vector<int> classes, size_t d, std::vector<double> params, int iterations,
                double grad_norm)
      : FittedModel(std::move(classes)),
        d_(d),
        params_(std::move(params)),
        iterations_(iterations),
        grad_norm_(grad_norm) {}

  EstimatorKind kind() const override { return EstimatorKind::kLogisticRegression; }

  Matrix PredictScores(const Matrix& x) const override {
    const size_t k = classes().size();
    Matrix out(x.rows(), k);
    for (size_t i = 0; i < x.rows(); ++i) {
      auto row = x.row(i);
      auto z = out.row(i);
      for (size_t c = 0; c < k; ++c) {
        const double* w = params_.data() + c * (d_ + 1);
        double acc = w[d_];
        for (size_t j = 0; j < d_; ++j) acc += w[j] * row[j];
        z[c] = acc;
      }
      Softmax(z);
    }
    return out;
  }

  std::string ToJson() const override {
    json j = Header(*this);
    j["d"] = d_;
    j["params"] = codec::EncodeDoubles(params_);
    j["tolerance"] = kLogisticTolerance;
    j["iterations"] = iterations_;
    j["gradient_norm"] = grad_norm_;
    return j.dump();
  }

  const std::vector<double>& params() const { return params_; }

 private:
  size_t d_;
  std::vector<double> params_;
  int iterations_;
  double grad_norm_;
};

// ---------------------------------------------------------------------------
// Gaussian naive Bayes

class GaussianNbModel : public FittedModel {
 public:
  GaussianNbModel(std::vector<int> classes, size_t d, std::vector<double> means,
                  std::vector<double> vars, std::vector<double> priors)
      : FittedModel(std::move(classes)),
        d_(d),
        means_(std::move(means)),
        vars_(std::move(vars)),
        priors_(std::move(priors)) {}

  EstimatorKind kind() const override { return EstimatorKind::kGaussianNb; }

  Matrix PredictScores(const Matrix& x) const override {
    const size_t k = classes().size();
    Matrix out(x.rows(), k);
    for (size_t i = 0; i < x.rows(); ++i) {
      auto row = x.row(i);
      auto z = out.row(i);
      for (size_t c = 0; c < k; ++c) {
        double acc = std::log(priors_[c]);
        for (size_t j = 0; j < d_; ++j) {
          const double v = vars_[c * d_ + j];
          const double diff = row[j] - means_[c * d_ + j];
          acc -= 0.5 * std::log(2.0 * M_PI * v) + 0.5 * diff * diff / v;
        }
        z[c] = acc;
      }
      Softmax(z);
    }
    return out;
  }

  std::string ToJson() const override {
    json j = Header(*this);
    j["d"] = d_;
    j["means"] = codec::EncodeDoubles(means_);
    j["vars"] = codec::EncodeDoubles(vars_);
    j["priors"] = codec::EncodeDoubles(priors_);
    return j.dump();
  }

 private:
  size_t d_;
  std::vector<double> means_;
  std::vector<double> vars_;
  std::vector<double> priors_;
};

// ---------------------------------------------------------------------------
// Fitting

std::vector<size_t> AllRows(size_t n) {
  std::vector<size_t> rows(n);
  std::iota(rows.begin(), rows.end(), size_t{0});
  return rows;
}

EstimatorSpec TreePart(const EstimatorSpec& spec) {
  EstimatorSpec t;
  t.kind = EstimatorKind::kDecisionTree;
  t.criterion = spec.criterion;
  t.max_depth = spec.max_depth;
  t.min_samples_split = spec.min_samples_split;
  t.min_samples_leaf = spec.min_samples_leaf;
  t.max_features = spec.max_features;
  t.min_impurity_decrease = spec.min_impurity_decrease;
  return t;
}

std::unique_ptr<FittedModel> FitRandomForest(const EstimatorSpec& spec, const Dataset& d, Rng& rng,
                                             const CancelToken& cancel) {
  const auto classes = SortedClasses(d.labels);
  const EstimatorSpec tree = TreePart(spec);
  std::vector<std::unique_ptr<TreeModel>> members;
  for (int t = 0; t < spec.n_estimators; ++t) {
    Rng child = rng.Child(static_cast<uint64_t>(t));
    std::vector<size_t> rows;
    if (spec.bootstrap) {
      rows.resize(d.rows());
      for (auto& r : rows) r = static_cast<size_t>(child.Below(d.rows()));
    } else {
      rows = AllRows(d.rows());
    }
    members.push_back(FitTreeWithClasses(EstimatorKind::kDecisionTree, tree, d.features, d.labels,
                                         rows, {}, classes, child, cancel));
  }
  return std::make_unique<VoteEnsemble>(spec.kind, classes, std::move(members),
                                        std::vector<std::vector<size_t>>(spec.n_estimators));
}

std::unique_ptr<FittedModel> FitBalancedForest(const EstimatorSpec& spec, const Dataset& d, Rng& rng,
                                               const CancelToken& cancel) {
  const auto classes = SortedClasses(d.labels);
  EstimatorSpec tree = TreePart(spec);
  tree.max_depth = 0;
  tree.min_samples_split = 2;
  tree.min_samples_leaf = 1;
  std::vector<std::unique_ptr<TreeModel>> members;
  for (int t = 0; t < spec.n_estimators; ++t) {
    Rng child = rng.Child(static_cast<uint64_t>(t));
    const auto rows = BalancedBootstrap(d.labels, child);
    members.push_back(FitTreeWithClasses(EstimatorKind::kDecisionTree, tree, d.features, d.labels,
                                         rows, {}, classes, child, cancel));
  }
  return std::make_unique<VoteEnsemble>(spec.kind, classes, std::move(members),
                                        std::vector<std::vector<size_t>>(spec.n_estimators));
}

std::unique_ptr<FittedModel> FitBalancedBagging(const EstimatorSpec& spec, const Dataset& d, Rng& rng,
                                                const CancelToken& cancel) {
  const auto classes = SortedClasses(d.labels);
  EstimatorSpec tree;
  const size_t dim = d.cols();
  std::vector<std::unique_ptr<TreeModel>> members;
  std::vector<std::vector<size_t>> columns;
  for (int t = 0; t < spec.n_estimators; ++t) {
    Rng child = rng.Child(static_cast<uint64_t>(t));
    const auto balanced = RandomUndersample(d.labels, child);
    const double frac = std::min(spec.max_samples, 1.0);
    const size_t m = std::max<size_t>(
        1, static_cast<size_t>(std::llround(frac * static_cast<double>(balanced.size()))));
    std::vector<size_t> rows(m);
    for (auto& r : rows) r = balanced[static_cast<size_t>(child.Below(balanced.size()))];

    const size_t k = std::max<size_t>(
        1, static_cast<size_t>(std::floor(std::min(spec.max_features, 1.0) * static_cast<double>(dim))));
    std::vector<size_t> cols;
    if (k < dim) {
      cols = child.SampleWithoutReplacement(dim, k);
      std::sort(cols.begin(), cols.end());
      Matrix projected(d.rows(), k);
      for (size_t i = 0; i < d.rows(); ++i) {
        for (size_t j = 0; j < k; ++j) projected(i, j) = d.features(i, cols[j]);
      }
      members.push_back(FitTreeWithClasses(EstimatorKind::kDecisionTree, tree, projected, d.labels,
                                           rows, {}, classes, child, cancel));
    } else {
      members.push_back(FitTreeWithClasses(EstimatorKind::kDecisionTree, tree, d.features, d.labels,
                                           rows, {}, classes, child, cancel));
    }
    columns.push_back(std::move(cols));
  }
  return std::make_unique<VoteEnsemble>(spec.kind, classes, std::move(members), std::move(columns));
}

constexpr int kBoostRetryCap = 10;

std::unique_ptr<FittedModel> FitRusBoost(const EstimatorSpec& spec, const Dataset& d, Rng& rng,
                                         const CancelToken& cancel) {
  const auto classes = SortedClasses(d.labels);
  const auto index = IndexOf(classes);
  const size_t n = d.rows();
  const double num_classes = static_cast<double>(classes.size());
  EstimatorSpec tree;
  tree.max_depth = spec.max_depth;
  tree.criterion = spec.criterion;

  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<std::unique_ptr<TreeModel>> members;
  std::vector<BoostRound> rounds;
  for (int round = 0; round < spec.n_estimators; ++round) {
    bool accepted = false;
    bool perfect = false;
    for (int attempt = 1; attempt <= kBoostRetryCap && !accepted; ++attempt) {
      cancel.Check();
      const auto rows = RandomUndersample(d.labels, rng);
      auto learner = FitTreeWithClasses(EstimatorKind::kDecisionTree, tree, d.features, d.labels,
                                        rows, w, classes, rng, cancel);
      std::vector<bool> miss(n);
      double err = 0.0, wsum = 0.0;
      for (size_t i = 0; i < n; ++i) {
        miss[i] = static_cast<int>(learner->PredictIndex(d.features.row(i))) !=
                  index[static_cast<size_t>(d.labels[i])];
        if (miss[i]) err += w[i];
        wsum += w[i];
      }
      err /= wsum;
      if (err >= 1.0 - 1.0 / num_classes) continue;
      BoostRound r;
      r.error = err;
      r.attempts = attempt;
      if (err <= 0.0) {
        r.alpha = 1.0;
        perfect = true;
      } else {
        r.alpha = spec.learning_rate * (std::log((1.0 - err) / err) + std::log(num_classes - 1.0));
        double total = 0.0;
        for (size_t i = 0; i < n; ++i) {
          if (miss[i]) w[i] *= std::exp(r.alpha);
          total += w[i];
        }
        for (double& v : w) v /= total;
      }
      r.weight_sum = std::accumulate(w.begin(), w.end(), 0.0);
      members.push_back(std::move(learner));
      rounds.push_back(r);
      accepted = true;
    }
    if (!accepted || perfect) break;
  }
  if (members.empty()) Fail(ErrorCode::kRuntime, "boosting failed to find weak learner");
  return std::make_unique<BoostModel>(classes, std::move(members), std::move(rounds));
}

std::unique_ptr<FittedModel> FitKnn(const EstimatorSpec& spec, const Dataset& d) {
  const auto classes = SortedClasses(d.labels);
  const auto index = IndexOf(classes);
  std::vector<int> class_index(d.rows());
  for (size_t i = 0; i < d.rows(); ++i) class_index[i] = index[static_cast<size_t>(d.labels[i])];
  return std::make_unique<KnnModel>(classes, d.features, std::move(class_index), spec.n_neighbors,
                                    spec.distance_weights, spec.p);
}

std::unique_ptr<FittedModel> FitLogistic(const EstimatorSpec& spec, const Dataset& d,
                                         const CancelToken& cancel) {
  const auto classes = SortedClasses(d.labels);
  const auto index = IndexOf(classes);
  const size_t n = d.rows();
  const size_t dim = d.cols();
  const size_t k = classes.size();
  std::vector<int> class_index(n);
  for (size_t i = 0; i < n; ++i) class_index[i] = index[static_cast<size_t>(d.labels[i])];

  // Lipschitz bound of the gradient: softmax curvature is at most 1/2.
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim + 1),
                                               static_cast<Eigen::Index>(dim + 1));
  for (size_t i = 0; i < n; ++i) {
    Eigen::VectorXd row(static_cast<Eigen::Index>(dim + 1));
    for (size_t j = 0; j < dim; ++j) row(static_cast<Eigen::Index>(j)) = d.features(i, j);
    row(static_cast<Eigen::Index>(dim)) = 1.0;
    gram.noalias() += row * row.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram, Eigen::EigenvaluesOnly);
  const double lambda_max = solver.eigenvalues().maxCoeff();
  const double lipschitz =
      0.5 * lambda_max / static_cast<double>(n) + 1.0 / (spec.c * static_cast<double>(n));
  const double step = 1.0 / lipschitz;

  std::vector<double> params(k * (dim + 1), 0.0);
  std::vector<double> grad;
  int iter = 0;
  double grad_norm = 0.0;
  for (; iter < kLogisticMaxIter; ++iter) {
    if (iter % 100 == 0) cancel.Check();
    LogisticObjective(d.features, class_index, k, spec.c, params, &grad);
    grad_norm = std::sqrt(std::inner_product(grad.begin(), grad.end(), grad.begin(), 0.0));
    if (grad_norm < kLogisticTolerance) break;
    for (size_t i = 0; i < params.size(); ++i) params[i] -= step * grad[i];
  }
  return std::make_unique<LogisticModel>(classes, dim, std::move(params), iter, grad_norm);
}

std::unique_ptr<FittedModel> FitGaussianNb(const Dataset& d) {
  const auto classes = SortedClasses(d.labels);
  const auto index = IndexOf(classes);
  const size_t n = d.rows();
  const size_t dim = d.cols();
  const size_t k = classes.size();
  std::vector<double> means(k * dim, 0.0), vars(k * dim, 0.0), counts(k, 0.0);
  for (size_t i = 0; i < n; ++i) {
    const auto c = static_cast<size_t>(index[static_cast<size_t>(d.labels[i])]);
    counts[c] += 1.0;
    for (size_t j = 0; j < dim; ++j) means[c * dim + j] += d.features(i, j);
  }
  for (size_t c = 0; c < k; ++c) {
    for (size_t j = 0; j < dim; ++j) means[c * dim + j] /= counts[c];
  }
  for (size_t i = 0; i < n; ++i) {
    const auto c = static_cast<size_t>(index[static_cast<size_t>(d.labels[i])]);
    for (size_t j = 0; j < dim; ++j) {
      const double diff = d.features(i, j) - means[c * dim + j];
      vars[c * dim + j] += diff * diff;
    }
  }
  // Smoothing: 1e-9 times the largest feature variance over all rows.
  double max_var = 0.0;
  for (size_t j = 0; j < dim; ++j) {
    double mean = 0.0, acc = 0.0;
    for (size_t i = 0; i < n; ++i) mean += d.features(i, j);
    mean /= static_cast<double>(n);
    for (size_t i = 0; i < n; ++i) acc += (d.features(i, j) - mean) * (d.features(i, j) - mean);
    max_var = std::max(max_var, acc / static_cast<double>(n));
  }
  const double epsilon = max_var > 0.0 ? 1e-9 * max_var : 1e-9;
  std::vector<double> priors(k);
  for (size_t c = 0; c < k; ++c) {
    for (size_t j = 0; j < dim; ++j) vars[c * dim + j] = vars[c * dim + j] / counts[c] + epsilon;
    priors[c] = counts[c] / static_cast<double>(n);
  }
  return std::make_unique<GaussianNbModel>(classes, dim, std::move(means), std::move(vars),
                                           std::move(priors));
}

}  // namespace

std::vector<size_t> BalancedBootstrap(std::span<const int> labels, Rng& rng) {
  std::map<int, std::vector<size_t>> groups;
  for (size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);
  size_t minority = std::numeric_limits<size_t>::max();
  for (const auto& [cls, rows] : groups) minority = std::min(minority, rows.size());
  std::vector<size_t> out;
  for (const auto& [cls, rows] : groups) {
    for (size_t s = 0; s < minority; ++s) out.push_back(rows[static_cast<size_t>(rng.Below(rows.size()))]);
  }
  return out;
}

std::vector<size_t> RandomUndersample(std::span<const int> labels, Rng& rng) {
  std::map<int, std::vector<size_t>> groups;
  for (size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);
  size_t minority = std::numeric_limits<size_t>::max();
  for (const auto& [cls, rows] : groups) minority = std::min(minority, rows.size());
  std::vector<size_t> out;
  for (const auto& [cls, rows] : groups) {
    for (size_t pick : rng.SampleWithoutReplacement(rows.size(), minority)) out.push_back(rows[pick]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::unique_ptr<FittedModel> FitTree(const EstimatorSpec& spec, const Matrix& x,
                                     std::span<const int> labels, std::span<const size_t> rows,
                                     std::span<const double> weights, Rng& rng,
                                     const CancelToken& cancel) {
  spec.Validate();
  return FitTreeWithClasses(EstimatorKind::kDecisionTree, spec, x, labels, rows, weights,
                            SortedClasses(labels, rows), rng, cancel);
}

double LogisticObjective(const Matrix& x, std::span<const int> class_index, size_t num_classes,
                         double c, std::span<const double> params, std::vector<double>* grad) {
  const size_t n = x.rows();
  const size_t dim = x.cols();
  const size_t width = dim + 1;
  if (params.size() != num_classes * width) Fail(ErrorCode::kInvalidArgument, "parameter size mismatch");
  if (grad) grad->assign(params.size(), 0.0);
  std::vector<double> z(num_classes);
  double loss = 0.0;
  for (size_t i = 0; i < n; ++i) {
    auto row = x.row(i);
    for (size_t k = 0; k < num_classes; ++k) {
      const double* w = params.data() + k * width;
      double acc = w[dim];
      for (size_t j = 0; j < dim; ++j) acc += w[j] * row[j];
      z[k] = acc;
    }
    const double m = *std::max_element(z.begin(), z.end());
    double s = 0.0;
    for (double v : z) s += std::exp(v - m);
    const double log_norm = m + std::log(s);
    const auto y = static_cast<size_t>(class_index[i]);
    loss += log_norm - z[y];
    if (grad) {
      for (size_t k = 0; k < num_classes; ++k) {
        const double r = std::exp(z[k] - log_norm) - (k == y ? 1.0 : 0.0);
        double* g = grad->data() + k * width;
        for (size_t j = 0; j < dim; ++j) g[j] += r * row[j];
        g[dim] += r;
      }
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  double penalty = 0.0;
  for (size_t k = 0; k < num_classes; ++k) {
    for (size_t j = 0; j < dim; ++j) penalty += params[k * width + j] * params[k * width + j];
  }
  if (grad) {
    for (double& g : *grad) g *= inv_n;
    for (size_t k = 0; k < num_classes; ++k) {
      for (size_t j = 0; j < dim; ++j) (*grad)[k * width + j] += params[k * width + j] * inv_n / c;
    }
  }
  return loss * inv_n + 0.5 * penalty * inv_n / c;
}

std::vector<double> LogisticParameters(const FittedModel& model) {
  const auto* m = dynamic_cast<const LogisticModel*>(&model);
  if (!m) Fail(ErrorCode::kInvalidArgument, "not a logistic regression model");
  return m->params();
}

std::vector<BoostRound> BoostRounds(const FittedModel& model) {
  const auto* m = dynamic_cast<const BoostModel*>(&model);
  if (!m) Fail(ErrorCode::kInvalidArgument, "not a boosting model");
  return m->rounds();
}

std::unique_ptr<FittedModel> Fit(const EstimatorSpec& spec, const Dataset& d, Rng& rng,
                                 const CancelToken& cancel) {
  spec.Validate();
  if (d.rows() < 2) Fail(ErrorCode::kInvalidArgument, "estimator needs at least 2 rows");
  if (d.cols() == 0) Fail(ErrorCode::kInvalidArgument, "estimator needs at least one feature");
  if (ComputeClassDistribution(d).counts.size() < 2) {
    Fail(ErrorCode::kInvalidArgument, "estimator needs at least two classes");
  }
  switch (spec.kind) {
    case EstimatorKind::kDecisionTree:
      return FitTreeWithClasses(EstimatorKind::kDecisionTree, spec, d.features, d.labels,
                                AllRows(d.rows()), {}, SortedClasses(d.labels), rng, cancel);
    case EstimatorKind::kDecisionStump: {
      EstimatorSpec stump;
      stump.max_depth = 1;
      return FitTreeWithClasses(EstimatorKind::kDecisionStump, stump, d.features, d.labels,
                                AllRows(d.rows()), {}, SortedClasses(d.labels), rng, cancel);
    }
    case EstimatorKind::kRandomForest: return FitRandomForest(spec, d, rng, cancel);
    case EstimatorKind::kBalancedRandomForest: return FitBalancedForest(spec, d, rng, cancel);
    case EstimatorKind::kBalancedBagging: return FitBalancedBagging(spec, d, rng, cancel);
    case EstimatorKind::kRusBoost: return FitRusBoost(spec, d, rng, cancel);
    case EstimatorKind::kKNeighbors: return FitKnn(spec, d);
    case EstimatorKind::kLogisticRegression: return FitLogistic(spec, d, cancel);
    case EstimatorKind::kGaussianNb: return FitGaussianNb(d);
  }
  Fail(ErrorCode::kInvalidArgument, "unknown estimator kind");
}

std::unique_ptr<FittedModel> LoadModel(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, std::string("model JSON: ") + e.what());
  }
  try {
    if (j.value("format", "") != "imbal.model") Fail(ErrorCode::kSchema, "not a model document");
    if (j.at("version").get<int>() != 1) {
      Fail(ErrorCode::kSchema, "unsupported model version " + j.at("version").dump());
    }
    const auto kind = KindFromName(j.at("kind").get<std::string>());
    auto classes = j.at("classes").get<std::vector<int>>();
    const size_t k = classes.size();
    auto load_members = [&](std::vector<std::vector<size_t>>* columns) {
      std::vector<std::unique_ptr<TreeModel>> members;
      for (const auto& m : j.at("members")) {
        members.push_back(std::make_unique<TreeModel>(EstimatorKind::kDecisionTree, classes,
                                                      TreeArrays::FromJson(m.at("tree"), k)));
        if (columns) columns->push_back(m.value("columns", std::vector<size_t>{}));
      }
      if (members.empty()) Fail(ErrorCode::kSchema, "ensemble without members");
      return members;
    };
    switch (kind) {
      case EstimatorKind::kDecisionTree:
      case EstimatorKind::kDecisionStump:
        return std::make_unique<TreeModel>(kind, classes, TreeArrays::FromJson(j.at("tree"), k));
      case EstimatorKind::kRandomForest:
      case EstimatorKind::kBalancedRandomForest:
      case EstimatorKind::kBalancedBagging: {
        std::vector<std::vector<size_t>> columns;
        auto members = load_members(&columns);
        return std::make_unique<VoteEnsemble>(kind, classes, std::move(members), std::move(columns));
      }
      case EstimatorKind::kRusBoost: {
        auto members = load_members(nullptr);
        const auto errors = codec::DecodeDoubles(j.at("error").get<std::string>());
        const auto alphas = codec::DecodeDoubles(j.at("alpha").get<std::string>());
        const auto sums = codec::DecodeDoubles(j.at("weight_sum").get<std::string>());
        const auto attempts = j.at("attempts").get<std::vector<int>>();
        if (errors.size() != members.size() || alphas.size() != members.size() ||
            sums.size() != members.size() || attempts.size() != members.size()) {
          Fail(ErrorCode::kSchema, "boosting arrays disagree with member count");
        }
        std::vector<BoostRound> rounds(members.size());
        for (size_t m = 0; m < members.size(); ++m) rounds[m] = {errors[m], alphas[m], attempts[m], sums[m]};
        return std::make_unique<BoostModel>(classes, std::move(members), std::move(rounds));
      }
      case EstimatorKind::kKNeighbors: {
        const size_t rows = j.at("rows").get<size_t>();
        const size_t cols = j.at("cols").get<size_t>();
        Matrix train(rows, cols, codec::DecodeDoubles(j.at("train").get<std::string>()));
        auto class_index = FromInt32(codec::DecodeInts(j.at("class_index").get<std::string>()));
        if (class_index.size() != rows) Fail(ErrorCode::kSchema, "kNN label count mismatch");
        return std::make_unique<KnnModel>(classes, std::move(train), std::move(class_index),
                                          j.at("n_neighbors").get<int>(),
                                          j.at("weights").get<std::string>() == "distance",
                                          j.at("p").get<int>());
      }
      case EstimatorKind::kLogisticRegression: {
        const size_t d = j.at("d").get<size_t>();
        auto params = codec::DecodeDoubles(j.at("params").get<std::string>());
        if (params.size() != k * (d + 1)) Fail(ErrorCode::kSchema, "logistic parameter size mismatch");
        return std::make_unique<LogisticModel>(classes, d, std::move(params),
                                               j.at("iterations").get<int>(),
                                               j.at("gradient_norm").get<double>());
      }
      case EstimatorKind::kGaussianNb: {
        const size_t d = j.at("d").get<size_t>();
        auto means = codec::DecodeDoubles(j.at("means").get<std::string>());
        auto vars = codec::DecodeDoubles(j.at("vars").get<std::string>());
        auto priors = codec::DecodeDoubles(j.at("priors").get<std::string>());
        if (means.size() != k * d || vars.size() != k * d || priors.size() != k) {
          Fail(ErrorCode::kSchema, "naive Bayes array size mismatch");
        }
        return std::make_unique<GaussianNbModel>(classes, d, std::move(means), std::move(vars),
                                                 std::move(priors));
      }
    }
  } catch (const json::exception& e) {
    Fail(ErrorCode::kSchema, std::string("model JSON: ") + e.what());
  }
  Fail(ErrorCode::kSchema, "unknown model kind");
}

}  // namespace imbal
