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

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "imbal/error.hpp"
#include "imbal/estimators.hpp"
#include "imbal/metalearn.hpp"

namespace imbal {

namespace {

const char* const kLandmarkers[] = {"DecisionStump", "NaiveBayes", "kNN1N"};

std::vector<std::string> BuildNames() {
  std::vector<std::string> names = {
      "NumberOfInstances",       "NumberOfFeatures",         "NumberOfClasses",
      "Dimensionality",          "MajorityClassSize",        "MinorityClassSize",
      "MajorityClassPercentage", "MinorityClassPercentage",  "NumberOfNumericFeatures",
      "NumberOfSymbolicFeatures", "NumberOfBinaryFeatures",  "PercentageOfMissingValues",
      "ClassEntropy"};
  for (const char* what : {"AttributeEntropy", "MutualInformation"}) {
    for (const char* stat : {"Mean", "Min", "Max", "Quartile1", "Quartile2", "Quartile3"}) {
      names.push_back(std::string(stat) + what);
    }
  }
  names.push_back("EquivalentNumberOfAtts");
  names.push_back("MeanNoiseToSignalRatio");
  for (const char* model : kLandmarkers) {
    for (const char* stat : {"AUC", "ErrRate", "Kappa"}) names.push_back(std::string(model) + stat);
  }
  return names;
}

constexpr int kBins = 10;

struct Summary {
  double mean = kNa, min = kNa, max = kNa, q1 = kNa, q2 = kNa, q3 = kNa;
};

Summary Summarize(const std::vector<double>& v) {
  Summary s;
  if (v.empty()) return s;
  double total = 0.0;
  for (double x : v) total += x;
  s.mean = total / static_cast<double>(v.size());
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  s.q1 = Quantile(v, 0.25);
  s.q2 = Quantile(v, 0.5);
  s.q3 = Quantile(v, 0.75);
  return s;
}

double Ratio(double num, double den) { return den == 0.0 || IsNa(num) || IsNa(den) ? kNa : num / den; }

struct Landmark {
  double auc = kNa, err = kNa, kappa = kNa;
};

Landmark RunLandmarker(const EstimatorSpec& spec, const Dataset& d, const FoldPlan& folds,
                       const std::vector<int>& classes, Rng& rng) {
  const size_t n = d.rows();
  std::vector<int> predicted(n, -1);
  std::vector<std::vector<double>> scores(classes.size(), std::vector<double>(n, 0.0));
  try {
    for (int f = 0; f < folds.k; ++f) {
      const auto train_rows = folds.TrainIndices(f);
      const auto valid_rows = folds.ValidationIndices(f);
      if (train_rows.empty() || valid_rows.empty()) continue;
      Rng fit_rng = rng.Child(static_cast<uint64_t>(f));
      const auto model = Fit(spec, d.Subset(train_rows), fit_rng);
      const Matrix x = d.features.SelectRows(valid_rows);
      const Matrix s = model->PredictScores(x);
      const auto pred = model->Predict(x);
      for (size_t i = 0; i < valid_rows.size(); ++i) {
        predicted[valid_rows[i]] = pred[i];
        for (size_t c = 0; c < model->classes().size(); ++c) {
          const auto pos = std::lower_bound(classes.begin(), classes.end(), model->classes()[c]);
          scores[static_cast<size_t>(pos - classes.begin())][valid_rows[i]] = s(i, c);
        }
      }
    }
  } catch (const Cancelled&) {
    throw;
  } catch (const Error&) {
    return {};
  }
  Landmark out;
  const auto cm = Confusion(d.labels, predicted);
  size_t correct = 0;
  for (size_t i = 0; i < n; ++i) correct += predicted[i] == d.labels[i] ? 1 : 0;
  out.err = 1.0 - static_cast<double>(correct) / static_cast<double>(n);
  out.kappa = CohenKappa(cm);
  double auc_total = 0.0;
  int auc_count = 0;
  for (size_t c = 0; c < classes.size(); ++c) {
    const double auc = RankAuc(scores[c], d.labels, classes[c]);
    if (!IsNa(auc)) {
      auc_total += auc;
      ++auc_count;
    }
  }
  if (auc_count > 0) out.auc = auc_total / auc_count;
  return out;
}

}  // namespace

const std::vector<std::string>& MetaFeatureNames() {
  static const std::vector<std::string> names = BuildNames();
  return names;
}

size_t MetaFeatureIndex(std::string_view name) {
  const auto& names = MetaFeatureNames();
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) Fail(ErrorCode::kInvalidArgument, "unknown meta-feature '" + std::string(name) + "'");
  return static_cast<size_t>(it - names.begin());
}

bool MetaFeatureVector::operator==(const MetaFeatureVector& o) const {
  if (values.size() != o.values.size()) return false;
  for (size_t i = 0; i < values.size(); ++i) {
    if (IsNa(values[i]) != IsNa(o.values[i])) return false;
    if (!IsNa(values[i]) && values[i] != o.values[i]) return false;
  }
  return true;
}

double EntropyBits(std::span<const size_t> counts) {
  double total = 0.0;
  for (size_t c : counts) total += static_cast<double>(c);
  if (total == 0.0) return 0.0;
  double h = 0.0;
  for (size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / total;
    h -= p * std::log2(p);
  }
  return h;
}

std::vector<int> EqualWidthBins(std::span<const double> values, int bins) {
  std::vector<int> out(values.size(), 0);
  if (values.empty()) return out;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double min = *lo;
  const double width = (*hi - min) / bins;
  if (width <= 0.0) return out;
  for (size_t i = 0; i < values.size(); ++i) {
    const int b = static_cast<int>(std::floor((values[i] - min) / width));
    out[i] = std::clamp(b, 0, bins - 1);
  }
  return out;
}

double MutualInformationBits(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) Fail(ErrorCode::kInvalidArgument, "mutual information: length mismatch");
  if (a.empty()) return 0.0;
  std::map<int, size_t> ca, cb;
  std::map<std::pair<int, int>, size_t> joint;
  for (size_t i = 0; i < a.size(); ++i) {
    ++ca[a[i]];
    ++cb[b[i]];
    ++joint[{a[i], b[i]}];
  }
  const double n = static_cast<double>(a.size());
  double mi = 0.0;
  for (const auto& [key, c] : joint) {
    const double pxy = static_cast<double>(c) / n;
    const double px = static_cast<double>(ca[key.first]) / n;
    const double py = static_cast<double>(cb[key.second]) / n;
    mi += pxy * std::log2(pxy / (px * py));
  }
  return std::max(0.0, mi);
}

double Quantile(std::vector<double> values, double q) {
  if (values.empty()) Fail(ErrorCode::kInvalidArgument, "quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + (values[hi] - values[lo]) * frac;
}

double RankAuc(std::span<const double> scores, std::span<const int> labels, int positive) {
  std::vector<size_t> order(scores.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  size_t pos = 0;
  for (size_t i = 0; i < order.size();) {
    size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (size_t t = i; t < j; ++t) {
      if (labels[order[t]] == positive) {
        rank_sum += avg_rank;
        ++pos;
      }
    }
    i = j;
  }
  const size_t neg = scores.size() - pos;
  if (pos == 0 || neg == 0) return kNa;
  const double p = static_cast<double>(pos);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
}

double CohenKappa(const ConfusionMatrix& cm) {
  const double n = static_cast<double>(cm.total());
  if (n == 0.0) return kNa;
  double observed = 0.0;
  double expected = 0.0;
  for (size_t i = 0; i < cm.classes.size(); ++i) {
    observed += static_cast<double>(cm.counts[i][i]) / n;
    expected += static_cast<double>(cm.row_sum(i)) / n * (static_cast<double>(cm.col_sum(i)) / n);
  }
  return Ratio(observed - expected, 1.0 - expected);
}

MetaFeatureVector ExtractMetaFeatures(const Dataset& d, Rng& rng) {
  d.Validate();
  const size_t n = d.rows();
  const size_t dims = d.cols();
  if (n < 4) Fail(ErrorCode::kInvalidArgument, "meta-features need at least 4 rows");
  MetaFeatureVector out;
  out.values.assign(MetaFeatureNames().size(), kNa);
  auto set = [&](std::string_view name, double v) { out.values[MetaFeatureIndex(name)] = v; };

  const auto dist = ComputeClassDistribution(d);
  const double rows = static_cast<double>(n);
  set("NumberOfInstances", rows);
  set("NumberOfFeatures", static_cast<double>(dims));
  set("NumberOfClasses", static_cast<double>(d.num_classes()));
  set("Dimensionality", static_cast<double>(dims) / rows);
  set("MajorityClassSize", static_cast<double>(dist.majority_size));
  set("MinorityClassSize", static_cast<double>(dist.minority_size));
  set("MajorityClassPercentage", 100.0 * static_cast<double>(dist.majority_size) / rows);
  set("MinorityClassPercentage", 100.0 * static_cast<double>(dist.minority_size) / rows);

  size_t numeric = 0, symbolic = 0, binary = 0, missing = 0;
  std::vector<double> attr_entropy, mutual_info;
  for (size_t j = 0; j < dims; ++j) {
    const bool categorical = j < d.columns.size() && d.columns[j].kind == ColumnKind::kCategorical;
    if (j < d.columns.size()) missing += d.columns[j].missing_count;
    (categorical ? symbolic : numeric) += 1;
    std::vector<double> col(n);
    for (size_t i = 0; i < n; ++i) col[i] = d.features(i, j);
    if (std::set<double>(col.begin(), col.end()).size() == 2) ++binary;
    std::vector<int> bins;
    if (categorical) {
      bins.resize(n);
      for (size_t i = 0; i < n; ++i) bins[i] = static_cast<int>(col[i]);
    } else {
      bins = EqualWidthBins(col, kBins);
    }
    std::map<int, size_t> counts;
    for (int b : bins) ++counts[b];
    std::vector<size_t> c;
    for (const auto& kv : counts) c.push_back(kv.second);
    attr_entropy.push_back(EntropyBits(c));
    mutual_info.push_back(MutualInformationBits(bins, d.labels));
  }
  set("NumberOfNumericFeatures", static_cast<double>(numeric));
  set("NumberOfSymbolicFeatures", static_cast<double>(symbolic));
  set("NumberOfBinaryFeatures", static_cast<double>(binary));
  set("PercentageOfMissingValues", Ratio(100.0 * static_cast<double>(missing), rows * static_cast<double>(dims)));

  std::vector<size_t> class_counts;
  for (const auto& kv : dist.counts) class_counts.push_back(kv.second);
  const double class_entropy = EntropyBits(class_counts);
  set("ClassEntropy", class_entropy);
  const Summary ae = Summarize(attr_entropy);
  const Summary mi = Summarize(mutual_info);
  for (const auto& [what, s] : {std::pair{"AttributeEntropy", ae}, std::pair{"MutualInformation", mi}}) {
    set(std::string("Mean") + what, s.mean);
    set(std::string("Min") + what, s.min);
    set(std::string("Max") + what, s.max);
    set(std::string("Quartile1") + what, s.q1);
    set(std::string("Quartile2") + what, s.q2);
    set(std::string("Quartile3") + what, s.q3);
  }
  set("EquivalentNumberOfAtts", Ratio(class_entropy, mi.mean));
  set("MeanNoiseToSignalRatio", Ratio(ae.mean - mi.mean, mi.mean));

  Rng fold_rng = rng.Child(0);
  const FoldPlan folds = StratifiedFolds(d, 2, fold_rng);
  std::vector<int> classes;
  for (const auto& kv : dist.counts) classes.push_back(kv.first);
  EstimatorSpec stump;
  stump.kind = EstimatorKind::kDecisionStump;
  EstimatorSpec bayes;
  bayes.kind = EstimatorKind::kGaussianNb;
  EstimatorSpec knn;
  knn.kind = EstimatorKind::kKNeighbors;
  knn.n_neighbors = 1;
  const EstimatorSpec specs[] = {stump, bayes, knn};
  for (size_t m = 0; m < 3; ++m) {
    Rng model_rng = rng.Child(1 + m);
    const Landmark lm = RunLandmarker(specs[m], d, folds, classes, model_rng);
    const std::string prefix = kLandmarkers[m];
    set(prefix + "AUC", lm.auc);
    set(prefix + "ErrRate", lm.err);
    set(prefix + "Kappa", lm.kappa);
  }
  return out;
}

}  // namespace imbal
