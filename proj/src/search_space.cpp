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
#include <charconv>
#include <cmath>

#include "imbal/error.hpp"
#include "imbal/pipeline.hpp"

namespace imbal {

std::string ParamValue::ToText() const {
  switch (type) {
    case ParamType::kInt: return std::to_string(i);
    case ParamType::kCategorical: return s;
    case ParamType::kReal: {
      char buf[64];
      auto res = std::to_chars(buf, buf + sizeof(buf), r);
      std::string text(buf, res.ptr);
      if (text.find_first_of(".eEn") == std::string::npos) text += ".0";
      return text;
    }
  }
  return {};
}

bool ParamDomain::Contains(const ParamValue& v) const {
  if (v.type != type) return false;
  switch (type) {
    case ParamType::kInt:
      if (!int_choices.empty()) {
        return std::find(int_choices.begin(), int_choices.end(), v.i) != int_choices.end();
      }
      return v.i >= int_lo && v.i <= int_hi;
    case ParamType::kReal: return std::isfinite(v.r) && v.r >= real_lo && v.r <= real_hi;
    case ParamType::kCategorical: return std::find(choices.begin(), choices.end(), v.s) != choices.end();
  }
  return false;
}

bool ParamDomain::LogScale() const {
  return type == ParamType::kReal && real_lo > 0.0 && real_hi / real_lo > 10.0;
}

size_t ParamDomain::Cardinality() const {
  switch (type) {
    case ParamType::kInt:
      return int_choices.empty() ? static_cast<size_t>(int_hi - int_lo + 1) : int_choices.size();
    case ParamType::kReal: return real_hi > real_lo ? 0 : 1;
    case ParamType::kCategorical: return choices.size();
  }
  return 0;
}

std::string ParamDomain::DescribeRange() const {
  switch (type) {
    case ParamType::kInt: {
      if (int_choices.empty()) return "[" + std::to_string(int_lo) + ", " + std::to_string(int_hi) + "]";
      std::string out = "{";
      for (size_t k = 0; k < int_choices.size(); ++k) out += (k ? ", " : "") + std::to_string(int_choices[k]);
      return out + "}";
    }
    case ParamType::kReal:
      return "[" + ParamValue::Real(real_lo).ToText() + ", " + ParamValue::Real(real_hi).ToText() + "]";
    case ParamType::kCategorical: {
      std::string out = "{";
      for (size_t k = 0; k < choices.size(); ++k) out += (k ? ", " : "") + choices[k];
      return out + "}";
    }
  }
  return {};
}

ParamValue ParamDomain::Sample(Rng& rng) const {
  switch (type) {
    case ParamType::kInt:
      if (!int_choices.empty()) return ParamValue::Int(int_choices[rng.Below(int_choices.size())]);
      return ParamValue::Int(rng.IntInclusive(int_lo, int_hi));
    case ParamType::kReal: {
      if (LogScale()) {
        const double v = std::exp(rng.Uniform(std::log(real_lo), std::log(real_hi)));
        return ParamValue::Real(std::clamp(v, real_lo, real_hi));
      }
      return ParamValue::Real(rng.Uniform(real_lo, real_hi));
    }
    case ParamType::kCategorical: return ParamValue::Cat(choices[rng.Below(choices.size())]);
  }
  return {};
}

const ParamDomain* ComponentSpec::Find(const std::string& param) const {
  for (const auto& p : params) {
    if (p.name == param) return &p;
  }
  return nullptr;
}

namespace {

ParamDomain IntRange(std::string name, int64_t lo, int64_t hi, int64_t def) {
  ParamDomain d;
  d.name = std::move(name);
  d.type = ParamType::kInt;
  d.int_lo = lo;
  d.int_hi = hi;
  d.default_value = ParamValue::Int(def);
  return d;
}

ParamDomain IntChoice(std::string name, std::vector<int64_t> choices, int64_t def) {
  ParamDomain d;
  d.name = std::move(name);
  d.type = ParamType::kInt;
  d.int_lo = *std::min_element(choices.begin(), choices.end());
  d.int_hi = *std::max_element(choices.begin(), choices.end());
  d.int_choices = std::move(choices);
  d.default_value = ParamValue::Int(def);
  return d;
}

ParamDomain RealRange(std::string name, double lo, double hi, double def) {
  ParamDomain d;
  d.name = std::move(name);
  d.type = ParamType::kReal;
  d.real_lo = lo;
  d.real_hi = hi;
  d.default_value = ParamValue::Real(def);
  return d;
}

ParamDomain Choice(std::string name, std::vector<std::string> choices, std::string def) {
  ParamDomain d;
  d.name = std::move(name);
  d.type = ParamType::kCategorical;
  d.choices = std::move(choices);
  d.default_value = ParamValue::Cat(std::move(def));
  return d;
}

ParamDomain Outside(ParamDomain d) {
  d.default_outside_range = true;
  return d;
}

SearchSpace BuildDefault() {
  using C = StepCategory;
  const auto k_neighbours = [] { return IntRange("k_neighbours", 1, 25, 5); };
  const auto criterion = [] { return Choice("criterion", {"gini", "entropy"}, "gini"); };
  const auto fraction = [](const char* name, double def) { return RealRange(name, 0.05, 1.01, def); };
  SearchSpace s;
  s.components = {
      {"SMOTE", C::kSampler, {k_neighbours()}},
      {"BorderlineSMOTE", C::kSampler,
       {k_neighbours(), Choice("kind", {"borderline-1", "borderline-2"}, "borderline-1"),
        IntRange("m_neighbours", 1, 25, 10)}},
      {"ADASYN", C::kSampler, {k_neighbours()}},
      {"EditedNearestNeighbours", C::kSampler, {k_neighbours()}},
      {"CondensedNearestNeighbour", C::kSampler, {k_neighbours()}},
      {"AllKNN", C::kSampler, {k_neighbours()}},
      {"ClusterCentroids", C::kSampler, {Choice("voting", {"auto", "hard", "soft"}, "auto")}},
      {"TomekLinks", C::kSampler, {}},
      {"SMOTEENN", C::kSampler, {Choice("sampling_strategy", {"auto", "minority", "all"}, "auto")}},
      {"SMOTETomek", C::kSampler, {k_neighbours()}},

      {"Normalizer", C::kPreprocessor, {}},
      {"Binarizer", C::kPreprocessor, {RealRange("threshold", 0.0, 1.0, 0.0)}},
      {"VarianceThreshold", C::kPreprocessor, {RealRange("threshold", 0.0, 1.0, 0.0)}},
      {"PCA", C::kPreprocessor, {IntRange("n_components", 1, 50, 2)}},
      {"PolynomialFeatures", C::kPreprocessor, {IntChoice("degree", {2}, 2)}},

      {"DecisionTreeClassifier", C::kEstimator,
       {criterion(), IntRange("max_depth", 1, 10, 10), IntRange("min_samples_split", 2, 20, 2),
        IntRange("min_samples_leaf", 1, 20, 1)}},
      {"RandomForestClassifier", C::kEstimator,
       {IntChoice("n_estimators", {100}, 100), criterion(), fraction("max_features", 1.0),
        IntRange("min_samples_split", 2, 20, 2), IntRange("min_samples_leaf", 1, 20, 1),
        Choice("bootstrap", {"true", "false"}, "true")}},
      {"KNeighborsClassifier", C::kEstimator,
       {IntRange("n_neighbors", 1, 25, 5), Choice("weights", {"uniform", "distance"}, "uniform"),
        IntChoice("p", {1, 2}, 2)}},
      {"LogisticRegression", C::kEstimator, {RealRange("C", 1e-4, 25.0, 1.0)}},
      {"GaussianNB", C::kEstimator, {}},
      {"BalancedRandomForestClassifier", C::kEstimator,
       {IntChoice("n_estimators", {100}, 100), criterion(), fraction("max_features", 1.0),
        Outside(fraction("min_impurity_decrease", 0.0))}},
      {"BalancedBaggingClassifier", C::kEstimator,
       {IntChoice("n_estimators", {10, 100}, 10), fraction("max_features", 1.0),
        fraction("max_samples", 1.0)}},
      {"RUSBoostClassifier", C::kEstimator,
       {fraction("learning_rate", 1.0), Outside(IntChoice("n_estimators", {50, 100}, 10)),
        IntRange("max_depth", 1, 3, 1)}},
  };
  s.Validate();
  return s;
}

}  // namespace

const SearchSpace& SearchSpace::Default() {
  static const SearchSpace space = BuildDefault();
  return space;
}

const ComponentSpec* SearchSpace::Find(const std::string& name) const {
  for (const auto& c : components) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::vector<const ComponentSpec*> SearchSpace::OfCategory(StepCategory category) const {
  std::vector<const ComponentSpec*> out;
  for (const auto& c : components) {
    if (c.category == category) out.push_back(&c);
  }
  return out;
}

void SearchSpace::Validate() const {
  for (auto category : {StepCategory::kSampler, StepCategory::kPreprocessor, StepCategory::kEstimator}) {
    if (OfCategory(category).empty()) Fail(ErrorCode::kSchema, "search space lacks a component category");
  }
  for (const auto& c : components) {
    for (const auto& p : c.params) {
      bool empty = false;
      switch (p.type) {
        case ParamType::kInt: empty = p.int_choices.empty() && p.int_lo > p.int_hi; break;
        case ParamType::kReal: empty = !(p.real_lo <= p.real_hi); break;
        case ParamType::kCategorical: empty = p.choices.empty(); break;
      }
      if (empty) Fail(ErrorCode::kSchema, c.name + "." + p.name + " has an empty domain");
      if (p.default_value.type != p.type) Fail(ErrorCode::kSchema, c.name + "." + p.name + " default has the wrong type");
      if (!p.default_outside_range && !p.Contains(p.default_value)) {
        Fail(ErrorCode::kSchema, c.name + "." + p.name + " default lies outside its domain");
      }
    }
  }
}

}  // namespace imbal
