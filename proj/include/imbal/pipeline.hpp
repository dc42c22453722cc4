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

#ifndef IMBAL_PIPELINE_HPP_
#define IMBAL_PIPELINE_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "imbal/estimators.hpp"
#include "imbal/preprocess.hpp"
#include "imbal/rng.hpp"
#include "imbal/samplers.hpp"

namespace imbal {

enum class StepCategory { kSampler, kPreprocessor, kEstimator };

enum class ParamType { kInt, kReal, kCategorical };

struct ParamValue {
  ParamType type = ParamType::kInt;
  int64_t i = 0;
  double r = 0.0;
  std::string s;

  static ParamValue Int(int64_t v) { return {ParamType::kInt, v, 0.0, {}}; }
  static ParamValue Real(double v) { return {ParamType::kReal, 0, v, {}}; }
  static ParamValue Cat(std::string v) { return {ParamType::kCategorical, 0, 0.0, std::move(v)}; }

  std::string ToText() const;
  bool operator==(const ParamValue&) const = default;
};

struct ParamDomain {
  std::string name;
  ParamType type = ParamType::kInt;
  int64_t int_lo = 0;
  int64_t int_hi = 0;
  std::vector<int64_t> int_choices;  // when non-empty, replaces [int_lo, int_hi]
  double real_lo = 0.0;
  double real_hi = 0.0;
  std::vector<std::string> choices;  // categorical
  ParamValue default_value;
  // Documented exception: the default may lie outside the search range.
  bool default_outside_range = false;

  bool Contains(const ParamValue& v) const;
  // True when sampling is log-uniform (real range spanning more than one
  // order of magnitude with a positive lower bound).
  bool LogScale() const;
  size_t Cardinality() const;  // 0 = continuous
  std::string DescribeRange() const;
  ParamValue Sample(Rng& rng) const;
};

struct ComponentSpec {
  std::string name;
  StepCategory category = StepCategory::kEstimator;
  std::vector<ParamDomain> params;

  const ParamDomain* Find(const std::string& param) const;
};

// Component inventory with hyperparameter domains.
struct SearchSpace {
  std::vector<ComponentSpec> components;

  // The built-in grammar: ten samplers, five preprocessors, eight estimators.
  static const SearchSpace& Default();

  const ComponentSpec* Find(const std::string& name) const;
  std::vector<const ComponentSpec*> OfCategory(StepCategory category) const;
  // Non-empty domains; defaults inside domains unless flagged as exceptions.
  void Validate() const;
};

struct Step {
  std::string component;
  std::vector<std::pair<std::string, ParamValue>> params;  // domain order, all bound

  const ParamValue& Get(const std::string& name) const;
  bool operator==(const Step&) const = default;
};

inline constexpr size_t kMaxSamplers = 2;
inline constexpr size_t kMaxPreprocessors = 3;

// Ordered steps; exactly one estimator, last.
struct Pipeline {
  std::vector<Step> steps;

  // Canonical text, e.g. "SMOTE(k_neighbours=5) >> Normalizer() >> GaussianNB()".
  std::string ToText() const;
  uint64_t Hash() const;
  std::string Id() const;  // 16 hex digits of Hash()
  const Step& estimator() const { return steps.back(); }

  bool operator==(const Pipeline&) const = default;
};

uint64_t HashText(const std::string& text);

// Throws kDomain / kInvalidArgument on any invariant violation.
void ValidatePipeline(const Pipeline& p, const SearchSpace& space);

// Step with every parameter at its default.
Step DefaultStep(const ComponentSpec& component);
Pipeline DefaultPipeline(const std::string& estimator, const SearchSpace& space = SearchSpace::Default());

Pipeline RandomPipeline(const SearchSpace& space, Rng& rng);

enum class MutationMove { kPerturb, kSwap, kInsert, kDelete };
const char* MutationMoveName(MutationMove move);

struct MutationResult {
  Pipeline pipeline;
  std::optional<MutationMove> move;  // last move tried
  bool exhausted = false;            // all retries reproduced the parent
};

std::vector<MutationMove> ApplicableMoves(const Pipeline& p, const SearchSpace& space);
MutationResult Mutate(const Pipeline& p, const SearchSpace& space, Rng& rng);

// One-point crossover: with probability 1/2 the parents swap roles; the child
// takes first.pre[0:c] + second.pre[c:] for a cut c uniform in
// [0, max(|first.pre|, |second.pre|)] and second's estimator, then trims to
// the step caps.
Pipeline Crossover(const Pipeline& a, const Pipeline& b, Rng& rng);

// Parses the canonical form. Parameters may appear in any order; omitted
// parameters take defaults. Syntax errors carry a 0-based position.
Pipeline ParsePipeline(const std::string& text, const SearchSpace& space = SearchSpace::Default());

// One component, e.g. "SMOTE(k_neighbours=7)"; same error contract.
Step ParseStep(const std::string& text, const SearchSpace& space = SearchSpace::Default());

StepCategory CategoryOf(const Step& step, const SearchSpace& space = SearchSpace::Default());
SamplerSpec ToSamplerSpec(const Step& step);
PreprocessorSpec ToPreprocessorSpec(const Step& step);
EstimatorSpec ToEstimatorSpec(const Step& step);

}  // namespace imbal

#endif  // IMBAL_PIPELINE_HPP_
