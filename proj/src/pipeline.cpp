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

#include "imbal/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>

#include "imbal/error.hpp"

namespace imbal {

const ParamValue& Step::Get(const std::string& name) const {
  for (const auto& [key, value] : params) {
    if (key == name) return value;
  }
  Fail(ErrorCode::kInvalidArgument, component + " has no parameter '" + name + "'");
}

std::string Pipeline::ToText() const {
  std::string out;
  for (size_t s = 0; s < steps.size(); ++s) {
    if (s) out += " >> ";
    out += steps[s].component + "(";
    for (size_t k = 0; k < steps[s].params.size(); ++k) {
      if (k) out += ", ";
      out += steps[s].params[k].first + "=" + steps[s].params[k].second.ToText();
    }
    out += ")";
  }
  return out;
}

uint64_t HashText(const std::string& text) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return Mix64(h);
}

uint64_t Pipeline::Hash() const { return HashText(ToText()); }

std::string Pipeline::Id() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(Hash()));
  return buf;
}

StepCategory CategoryOf(const Step& step, const SearchSpace& space) {
  const auto* c = space.Find(step.component);
  if (!c) Fail(ErrorCode::kDomain, "unknown component '" + step.component + "'");
  return c->category;
}

void ValidatePipeline(const Pipeline& p, const SearchSpace& space) {
  if (p.steps.empty()) Fail(ErrorCode::kInvalidArgument, "pipeline has no steps");
  size_t samplers = 0, preprocessors = 0;
  for (size_t s = 0; s < p.steps.size(); ++s) {
    const Step& step = p.steps[s];
    const auto* c = space.Find(step.component);
    if (!c) Fail(ErrorCode::kDomain, "unknown component '" + step.component + "'");
    const bool last = s + 1 == p.steps.size();
    if (last != (c->category == StepCategory::kEstimator)) {
      Fail(ErrorCode::kInvalidArgument, "pipeline needs exactly one estimator, in last position");
    }
    samplers += c->category == StepCategory::kSampler;
    preprocessors += c->category == StepCategory::kPreprocessor;
    if (step.params.size() != c->params.size()) {
      Fail(ErrorCode::kDomain, step.component + " must bind exactly its " +
                                   std::to_string(c->params.size()) + " parameter(s)");
    }
    for (size_t k = 0; k < c->params.size(); ++k) {
      const auto& domain = c->params[k];
      const auto& [name, value] = step.params[k];
      if (name != domain.name) Fail(ErrorCode::kDomain, step.component + ": unexpected parameter '" + name + "'");
      const bool ok = domain.Contains(value) ||
                      (domain.default_outside_range && value == domain.default_value);
      if (!ok) {
        Fail(ErrorCode::kDomain, step.component + "." + name + "=" + value.ToText() + " outside " +
                                     domain.DescribeRange());
      }
    }
  }
  if (samplers > kMaxSamplers) Fail(ErrorCode::kInvalidArgument, "pipeline exceeds 2 sampler steps");
  if (preprocessors > kMaxPreprocessors) {
    Fail(ErrorCode::kInvalidArgument, "pipeline exceeds 3 preprocessor steps");
  }
}

Step DefaultStep(const ComponentSpec& component) {
  Step step{component.name, {}};
  for (const auto& p : component.params) step.params.emplace_back(p.name, p.default_value);
  return step;
}

Pipeline DefaultPipeline(const std::string& estimator, const SearchSpace& space) {
  const auto* c = space.Find(estimator);
  if (!c || c->category != StepCategory::kEstimator) {
    Fail(ErrorCode::kInvalidArgument, "'" + estimator + "' is not an estimator");
  }
  return Pipeline{{DefaultStep(*c)}};
}

namespace {

Step RandomStep(const ComponentSpec& component, Rng& rng) {
  Step step{component.name, {}};
  for (const auto& p : component.params) step.params.emplace_back(p.name, p.Sample(rng));
  return step;
}

const ComponentSpec& Pick(const std::vector<const ComponentSpec*>& options, Rng& rng) {
  return *options[static_cast<size_t>(rng.Below(options.size()))];
}

size_t CountCategory(const Pipeline& p, StepCategory category, const SearchSpace& space) {
  size_t n = 0;
  for (const auto& s : p.steps) n += CategoryOf(s, space) == category;
  return n;
}

std::vector<std::pair<size_t, size_t>> TunableParams(const Pipeline& p, const SearchSpace& space) {
  std::vector<std::pair<size_t, size_t>> out;
  for (size_t s = 0; s < p.steps.size(); ++s) {
    const auto* c = space.Find(p.steps[s].component);
    for (size_t k = 0; k < c->params.size(); ++k) {
      if (c->params[k].Cardinality() != 1) out.emplace_back(s, k);
    }
  }
  return out;
}

Pipeline ApplyMove(const Pipeline& p, MutationMove move, const SearchSpace& space, Rng& rng) {
  Pipeline child = p;
  switch (move) {
    case MutationMove::kPerturb: {
      const auto tunable = TunableParams(p, space);
      const auto [s, k] = tunable[static_cast<size_t>(rng.Below(tunable.size()))];
      const auto& domain = space.Find(p.steps[s].component)->params[k];
      auto& value = child.steps[s].params[k].second;
      const ParamValue old = value;
      for (int tries = 0; tries < 10 && value == old; ++tries) value = domain.Sample(rng);
      break;
    }
    case MutationMove::kSwap: {
      const size_t s = static_cast<size_t>(rng.Below(p.steps.size()));
      const auto category = CategoryOf(p.steps[s], space);
      std::vector<const ComponentSpec*> options;
      for (const auto* c : space.OfCategory(category)) {
        if (c->name != p.steps[s].component) options.push_back(c);
      }
      if (!options.empty()) child.steps[s] = RandomStep(Pick(options, rng), rng);
      break;
    }
    case MutationMove::kInsert: {
      std::vector<StepCategory> room;
      if (CountCategory(p, StepCategory::kSampler, space) < kMaxSamplers) room.push_back(StepCategory::kSampler);
      if (CountCategory(p, StepCategory::kPreprocessor, space) < kMaxPreprocessors) {
        room.push_back(StepCategory::kPreprocessor);
      }
      const auto category = room[static_cast<size_t>(rng.Below(room.size()))];
      Step step = RandomStep(Pick(space.OfCategory(category), rng), rng);
      const size_t pos = static_cast<size_t>(rng.Below(p.steps.size()));  // before the estimator
      child.steps.insert(child.steps.begin() + static_cast<std::ptrdiff_t>(pos), std::move(step));
      break;
    }
    case MutationMove::kDelete: {
      const size_t pos = static_cast<size_t>(rng.Below(p.steps.size() - 1));
      child.steps.erase(child.steps.begin() + static_cast<std::ptrdiff_t>(pos));
      break;
    }
  }
  return child;
}

// Drops surplus samplers/preprocessors, keeping the earliest ones.
void TrimToCaps(Pipeline& p, const SearchSpace& space) {
  size_t samplers = 0, preprocessors = 0;
  std::vector<Step> kept;
  for (auto& step : p.steps) {
    const auto category = CategoryOf(step, space);
    if (category == StepCategory::kSampler && ++samplers > kMaxSamplers) continue;
    if (category == StepCategory::kPreprocessor && ++preprocessors > kMaxPreprocessors) continue;
    kept.push_back(std::move(step));
  }
  p.steps = std::move(kept);
}

}  // namespace

Pipeline RandomPipeline(const SearchSpace& space, Rng& rng) {
  const Step estimator = RandomStep(Pick(space.OfCategory(StepCategory::kEstimator), rng), rng);
  const size_t samplers = static_cast<size_t>(rng.Below(2));
  const size_t preprocessors = static_cast<size_t>(rng.Below(3));
  Pipeline p;
  for (size_t i = 0; i < samplers; ++i) {
    p.steps.push_back(RandomStep(Pick(space.OfCategory(StepCategory::kSampler), rng), rng));
  }
  for (size_t i = 0; i < preprocessors; ++i) {
    p.steps.push_back(RandomStep(Pick(space.OfCategory(StepCategory::kPreprocessor), rng), rng));
  }
  p.steps.push_back(estimator);
  return p;
}

const char* MutationMoveName(MutationMove move) {
  switch (move) {
    case MutationMove::kPerturb: return "perturb";
    case MutationMove::kSwap: return "swap";
    case MutationMove::kInsert: return "insert";
    case MutationMove::kDelete: return "delete";
  }
  return "?";
}

std::vector<MutationMove> ApplicableMoves(const Pipeline& p, const SearchSpace& space) {
  std::vector<MutationMove> moves;
  if (!TunableParams(p, space).empty()) moves.push_back(MutationMove::kPerturb);
  moves.push_back(MutationMove::kSwap);
  if (CountCategory(p, StepCategory::kSampler, space) < kMaxSamplers ||
      CountCategory(p, StepCategory::kPreprocessor, space) < kMaxPreprocessors) {
    moves.push_back(MutationMove::kInsert);
  }
  if (p.steps.size() > 1) moves.push_back(MutationMove::kDelete);
  return moves;
}

MutationResult Mutate(const Pipeline& p, const SearchSpace& space, Rng& rng) {
  const auto moves = ApplicableMoves(p, space);
  const uint64_t parent = p.Hash();
  MutationResult result{p, std::nullopt, true};
  for (int attempt = 0; attempt < 10; ++attempt) {
    const auto move = moves[static_cast<size_t>(rng.Below(moves.size()))];
    Pipeline child = ApplyMove(p, move, space, rng);
    result.move = move;
    if (child.Hash() != parent) {
      result.pipeline = std::move(child);
      result.exhausted = false;
      return result;
    }
  }
  return result;
}

Pipeline Crossover(const Pipeline& a, const Pipeline& b, Rng& rng) {
  const bool swap = rng.Bernoulli(0.5);
  const Pipeline& first = swap ? b : a;
  const Pipeline& second = swap ? a : b;
  const size_t first_pre = first.steps.size() - 1;
  const size_t second_pre = second.steps.size() - 1;
  const size_t cut = static_cast<size_t>(rng.Below(std::max(first_pre, second_pre) + 1));
  Pipeline child;
  for (size_t i = 0; i < std::min(cut, first_pre); ++i) child.steps.push_back(first.steps[i]);
  for (size_t i = cut; i < second_pre; ++i) child.steps.push_back(second.steps[i]);
  child.steps.push_back(second.steps.back());
  TrimToCaps(child, SearchSpace::Default());
  return child;
}

namespace {

class Parser {
 public:
  Parser(const std::string& text, const SearchSpace& space) : text_(text), space_(space) {}

  Pipeline Run() {
    Pipeline p;
    SkipSpace();
    if (pos_ >= text_.size()) SyntaxError("empty pipeline text");
    p.steps.push_back(ParseStep());
    SkipSpace();
    while (pos_ < text_.size()) {
      Expect(">>");
      p.steps.push_back(ParseStep());
      SkipSpace();
    }
    ValidatePipeline(p, space_);
    return p;
  }

  Step RunStep() {
    SkipSpace();
    if (pos_ >= text_.size()) SyntaxError("empty step text");
    Step step = ParseStep();
    SkipSpace();
    if (pos_ < text_.size()) SyntaxError("unexpected trailing text");
    return step;
  }

 private:
  [[noreturn]] void SyntaxError(const std::string& what) const {
    Fail(ErrorCode::kParse, "syntax error at position " + std::to_string(pos_) + ": " + what);
  }

  void SkipSpace() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  void Expect(const std::string& token) {
    SkipSpace();
    if (text_.compare(pos_, token.size(), token) != 0) SyntaxError("expected '" + token + "'");
    pos_ += token.size();
  }

  std::string Identifier() {
    SkipSpace();
    const size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    if (start == pos_ || std::isdigit(static_cast<unsigned char>(text_[start]))) {
      pos_ = start;
      SyntaxError("expected an identifier");
    }
    return text_.substr(start, pos_ - start);
  }

  std::string ValueToken() {
    SkipSpace();
    if (pos_ < text_.size() && (text_[pos_] == '\'' || text_[pos_] == '"')) {
      const char quote = text_[pos_];
      const size_t close = text_.find(quote, pos_ + 1);
      if (close == std::string::npos) SyntaxError("unterminated string");
      std::string v = text_.substr(pos_ + 1, close - pos_ - 1);
      pos_ = close + 1;
      return v;
    }
    const size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                   std::string_view("_.+-").find(text_[pos_]) != std::string_view::npos)) {
      ++pos_;
    }
    if (start == pos_) SyntaxError("expected a value");
    return text_.substr(start, pos_ - start);
  }

  static ParamValue Convert(const std::string& component, const ParamDomain& domain,
                            const std::string& token) {
    const char* first = token.data();
    const char* last = token.data() + token.size();
    switch (domain.type) {
      case ParamType::kInt: {
        int64_t v = 0;
        auto res = std::from_chars(first, last, v);
        if (res.ec != std::errc() || res.ptr != last) {
          Fail(ErrorCode::kDomain, component + "." + domain.name + ": expected an integer, got '" + token + "'");
        }
        return ParamValue::Int(v);
      }
      case ParamType::kReal: {
        double v = 0.0;
        auto res = std::from_chars(first, last, v);
        if (res.ec != std::errc() || res.ptr != last) {
          Fail(ErrorCode::kDomain, component + "." + domain.name + ": expected a number, got '" + token + "'");
        }
        return ParamValue::Real(v);
      }
      case ParamType::kCategorical: return ParamValue::Cat(token);
    }
    return {};
  }

  Step ParseStep() {
    SkipSpace();
    const size_t name_pos = pos_;
    const std::string name = Identifier();
    const auto* component = space_.Find(name);
    if (!component) {
      pos_ = name_pos;
      SyntaxError("unknown component '" + name + "'");
    }
    Expect("(");
    std::vector<std::optional<ParamValue>> bound(component->params.size());
    SkipSpace();
    if (pos_ < text_.size() && text_[pos_] == ')') {
      ++pos_;
    } else {
      while (true) {
        const std::string key = Identifier();
        const ParamDomain* domain = component->Find(key);
        if (!domain) Fail(ErrorCode::kDomain, name + ": unknown parameter '" + key + "'");
        const auto index = static_cast<size_t>(domain - component->params.data());
        if (bound[index]) Fail(ErrorCode::kDomain, name + ": parameter '" + key + "' given twice");
        Expect("=");
        bound[index] = Convert(name, *domain, ValueToken());
        SkipSpace();
        if (pos_ < text_.size() && text_[pos_] == ',') {
          ++pos_;
          continue;
        }
        Expect(")");
        break;
      }
    }
    Step step{name, {}};
    for (size_t k = 0; k < component->params.size(); ++k) {
      step.params.emplace_back(component->params[k].name,
                               bound[k] ? *bound[k] : component->params[k].default_value);
    }
    return step;
  }

  const std::string& text_;
  const SearchSpace& space_;
  size_t pos_ = 0;
};

int AsInt(const Step& step, const std::string& name) { return static_cast<int>(step.Get(name).i); }

}  // namespace

Pipeline ParsePipeline(const std::string& text, const SearchSpace& space) {
  return Parser(text, space).Run();
}

Step ParseStep(const std::string& text, const SearchSpace& space) { return Parser(text, space).RunStep(); }

SamplerSpec ToSamplerSpec(const Step& step) {
  SamplerSpec spec;
  const std::string& n = step.component;
  if (n == "SMOTE") {
    spec.kind = SamplerKind::kSmote;
  } else if (n == "BorderlineSMOTE") {
    spec.kind = SamplerKind::kBorderlineSmote;
    spec.m_neighbours = AsInt(step, "m_neighbours");
    spec.borderline = step.Get("kind").s == "borderline-2" ? BorderlineKind::kBorderline2
                                                            : BorderlineKind::kBorderline1;
  } else if (n == "ADASYN") {
    spec.kind = SamplerKind::kAdasyn;
  } else if (n == "EditedNearestNeighbours") {
    spec.kind = SamplerKind::kEditedNearestNeighbours;
  } else if (n == "CondensedNearestNeighbour") {
    spec.kind = SamplerKind::kCondensedNearestNeighbour;
  } else if (n == "AllKNN") {
    spec.kind = SamplerKind::kAllKnn;
  } else if (n == "ClusterCentroids") {
    spec.kind = SamplerKind::kClusterCentroids;
    const auto& v = step.Get("voting").s;
    spec.voting = v == "hard" ? Voting::kHard : v == "soft" ? Voting::kSoft : Voting::kAuto;
    return spec;
  } else if (n == "TomekLinks") {
    spec.kind = SamplerKind::kTomekLinks;
    return spec;
  } else if (n == "SMOTEENN") {
    spec.kind = SamplerKind::kSmoteEnn;
    const auto& v = step.Get("sampling_strategy").s;
    spec.strategy = v == "minority" ? SmoteEnnStrategy::kMinority
                    : v == "all"    ? SmoteEnnStrategy::kAll
                                    : SmoteEnnStrategy::kAuto;
    return spec;
  } else if (n == "SMOTETomek") {
    spec.kind = SamplerKind::kSmoteTomek;
  } else {
    Fail(ErrorCode::kInvalidArgument, "'" + n + "' is not a sampler");
  }
  spec.k_neighbours = AsInt(step, "k_neighbours");
  return spec;
}

PreprocessorSpec ToPreprocessorSpec(const Step& step) {
  PreprocessorSpec spec;
  const std::string& n = step.component;
  if (n == "Normalizer") {
    spec.kind = PreprocessorKind::kNormalizer;
  } else if (n == "Binarizer") {
    spec.kind = PreprocessorKind::kBinarizer;
    spec.threshold = step.Get("threshold").r;
  } else if (n == "VarianceThreshold") {
    spec.kind = PreprocessorKind::kVarianceThreshold;
    spec.threshold = step.Get("threshold").r;
  } else if (n == "PCA") {
    spec.kind = PreprocessorKind::kPca;
    spec.n_components = AsInt(step, "n_components");
  } else if (n == "PolynomialFeatures") {
    spec.kind = PreprocessorKind::kPolynomialFeatures;
    spec.degree = AsInt(step, "degree");
  } else {
    Fail(ErrorCode::kInvalidArgument, "'" + n + "' is not a preprocessor");
  }
  return spec;
}

EstimatorSpec ToEstimatorSpec(const Step& step) {
  EstimatorSpec spec;
  const std::string& n = step.component;
  auto criterion = [&] {
    return step.Get("criterion").s == "entropy" ? Criterion::kEntropy : Criterion::kGini;
  };
  if (n == "DecisionTreeClassifier") {
    spec.kind = EstimatorKind::kDecisionTree;
    spec.criterion = criterion();
    spec.max_depth = AsInt(step, "max_depth");
    spec.min_samples_split = AsInt(step, "min_samples_split");
    spec.min_samples_leaf = AsInt(step, "min_samples_leaf");
  } else if (n == "RandomForestClassifier") {
    spec.kind = EstimatorKind::kRandomForest;
    spec.n_estimators = AsInt(step, "n_estimators");
    spec.criterion = criterion();
    spec.max_features = step.Get("max_features").r;
    spec.min_samples_split = AsInt(step, "min_samples_split");
    spec.min_samples_leaf = AsInt(step, "min_samples_leaf");
    spec.bootstrap = step.Get("bootstrap").s == "true";
  } else if (n == "KNeighborsClassifier") {
    spec.kind = EstimatorKind::kKNeighbors;
    spec.n_neighbors = AsInt(step, "n_neighbors");
    spec.distance_weights = step.Get("weights").s == "distance";
    spec.p = AsInt(step, "p");
  } else if (n == "LogisticRegression") {
    spec.kind = EstimatorKind::kLogisticRegression;
    spec.c = step.Get("C").r;
  } else if (n == "GaussianNB") {
    spec.kind = EstimatorKind::kGaussianNb;
  } else if (n == "BalancedRandomForestClassifier") {
    spec.kind = EstimatorKind::kBalancedRandomForest;
    spec.n_estimators = AsInt(step, "n_estimators");
    spec.criterion = criterion();
    spec.max_features = step.Get("max_features").r;
    spec.min_impurity_decrease = step.Get("min_impurity_decrease").r;
  } else if (n == "BalancedBaggingClassifier") {
    spec.kind = EstimatorKind::kBalancedBagging;
    spec.n_estimators = AsInt(step, "n_estimators");
    spec.max_features = step.Get("max_features").r;
    spec.max_samples = step.Get("max_samples").r;
  } else if (n == "RUSBoostClassifier") {
    spec.kind = EstimatorKind::kRusBoost;
    spec.learning_rate = step.Get("learning_rate").r;
    spec.n_estimators = AsInt(step, "n_estimators");
    spec.max_depth = AsInt(step, "max_depth");
  } else {
    Fail(ErrorCode::kInvalidArgument, "'" + n + "' is not an estimator");
  }
  return spec;
}

}  // namespace imbal
