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

#ifndef IMBAL_SEARCH_HPP_
#define IMBAL_SEARCH_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "imbal/evaluate.hpp"

namespace imbal {

enum class SearchAlgorithm { kRandom, kAsyncEa, kAsha };
const char* SearchAlgorithmName(SearchAlgorithm a);
SearchAlgorithm ParseSearchAlgorithm(const std::string& name);

struct SearchConfig {
  SearchAlgorithm algorithm = SearchAlgorithm::kAsyncEa;
  MetricId metric = MetricId::kBalancedAccuracy;
  double budget_seconds = 3600.0;
  int workers = 1;
  uint64_t seed = 0;
  int folds = 5;
  std::vector<Pipeline> warm_start;

  // AsyncEA.
  int population_size = 50;
  int tournament_size = 3;
  double crossover_rate = 0.3;

  // ASHA.
  int eta = 3;
  double min_resource = 1.0 / 9.0;
  // Stop creating new configurations after this many (0 = unlimited).
  int64_t max_configs = 0;

  // Stop dispatching after this many evaluations (0 = unlimited).
  int64_t max_evaluations = 0;
  // Optional JSON-lines evaluation log.
  std::string log_path;

  void Validate() const;
};

// One unit of work handed to the evaluator.
struct Job {
  Pipeline pipeline;
  int64_t config_id = -1;
  int rung = -1;
  double resource = 1.0;
};

// Search state machine. All calls happen on the coordinator thread.
class Strategy {
 public:
  virtual ~Strategy() = default;
  // Next job, or nullopt when nothing can be dispatched right now.
  virtual std::optional<Job> Next() = 0;
  virtual void Complete(const Job& job, const EvaluationResult& result) = 0;
  // Current incumbent, if any.
  virtual std::optional<EvaluationResult> Incumbent() const = 0;
};

class RandomStrategy : public Strategy {
 public:
  RandomStrategy(const SearchSpace& space, const SearchConfig& cfg);
  std::optional<Job> Next() override;
  void Complete(const Job& job, const EvaluationResult& result) override;
  std::optional<EvaluationResult> Incumbent() const override { return best_; }

 private:
  const SearchSpace& space_;
  Rng rng_;
  std::vector<Pipeline> warm_;
  int64_t next_id_ = 0;
  std::optional<EvaluationResult> best_;
};

// Steady-state asynchronous evolution. The initial population (warm start
// first, then random pipelines) is dispatched before any offspring. Offspring
// come from tournament selection over completed ok members, crossover with
// probability crossover_rate, otherwise mutation; a child replaces the
// current worst member when strictly better.
class AsyncEaStrategy : public Strategy {
 public:
  struct Member {
    Pipeline pipeline;
    EvaluationResult result;
  };

  AsyncEaStrategy(const SearchSpace& space, const SearchConfig& cfg);
  std::optional<Job> Next() override;
  void Complete(const Job& job, const EvaluationResult& result) override;
  std::optional<EvaluationResult> Incumbent() const override { return best_; }

  const std::vector<Member>& population() const { return population_; }
  // Human-readable trace ("init <id>", "mutate:<move> <parent> -> <child>",
  // "crossover <a> <b> -> <child>", "replace <slot>", "discard <id>").
  const std::vector<std::string>& events() const { return events_; }

 private:
  const Member& Tournament();

  const SearchSpace& space_;
  SearchConfig cfg_;
  Rng rng_;
  std::vector<Pipeline> initial_;
  size_t initial_dispatched_ = 0;
  std::map<int64_t, bool> is_initial_;
  std::vector<Member> population_;
  std::set<uint64_t> seen_;
  int64_t next_id_ = 0;
  std::optional<EvaluationResult> best_;
  std::vector<std::string> events_;
};

// Asynchronous successive halving over training-subsample fractions.
class AshaStrategy : public Strategy {
 public:
  AshaStrategy(const SearchSpace& space, const SearchConfig& cfg);
  // For scripted runs: configurations are taken from `configs` in order.
  AshaStrategy(std::vector<Pipeline> configs, const SearchConfig& cfg);

  std::optional<Job> Next() override;
  void Complete(const Job& job, const EvaluationResult& result) override;
  std::optional<EvaluationResult> Incumbent() const override;

  const std::vector<double>& rungs() const { return rungs_; }
  // Number of promotions into rung i (index 0 unused).
  std::vector<int> promotions() const;

 private:
  struct Entry {
    int64_t config_id;
    double score;  // -inf for non-ok
    int64_t order; // completion order within the rung
  };

  const SearchSpace* space_ = nullptr;
  SearchConfig cfg_;
  Rng rng_;
  std::vector<Pipeline> scripted_;
  std::vector<Pipeline> warm_;
  std::vector<double> rungs_;
  std::map<int64_t, Pipeline> configs_;
  std::vector<std::vector<Entry>> completed_;     // per rung
  std::vector<std::set<int64_t>> promoted_;       // per rung: configs promoted out of it
  int64_t next_id_ = 0;
  int64_t completions_ = 0;
  std::optional<EvaluationResult> best_top_;
  std::optional<EvaluationResult> best_any_;
};

// Resource levels r_i = min_resource * eta^i, the last one exactly 1.
std::vector<double> AshaRungs(double min_resource, int eta);

struct AshaAuditReport {
  bool ok = true;
  std::vector<std::string> violations;
  std::vector<int> promotions;  // promotions into rung i
};

// Replays a result history (ordered by `sequence`) and checks that every
// rung-(i+1) job was, at its dispatch, backed by a completed ok rung-i result
// ranked within the top floor(n/eta) of the rung-i results completed before
// that dispatch.
AshaAuditReport AuditAsha(std::vector<EvaluationResult> history, int eta);

struct SearchReport {
  SearchAlgorithm algorithm = SearchAlgorithm::kAsyncEa;
  MetricId metric = MetricId::kBalancedAccuracy;
  double budget_seconds = 0.0;
  int workers = 1;
  uint64_t seed = 0;
  int folds = 5;
  std::optional<EvaluationResult> best;
  bool no_result = true;
  std::vector<EvaluationResult> history;  // completion order
  int64_t evaluations_completed = 0;
  int64_t evaluations_timed_out = 0;
  int64_t evaluations_failed = 0;
  double wall_clock = 0.0;
  // Incumbent score after each completion (-inf before the first).
  std::vector<double> incumbent_trace;

  // Timing fields are omitted when include_timing is false.
  std::string ToJson(bool include_timing = true) const;
};

SearchReport SearchReportFromJson(const std::string& json_text);

using Evaluator = std::function<EvaluationResult(const Job& job, const CancelToken& cancel)>;

// Default evaluator: k-fold evaluation over a fixed fold plan. The evaluation
// seed depends only on (cfg.seed, pipeline hash, resource).
Evaluator MakeEvaluator(const Dataset& d, const FoldPlan& folds, const SearchConfig& cfg,
                        std::function<void(int, const Dataset&)> validation_observer = nullptr);

std::unique_ptr<Strategy> MakeStrategy(const SearchSpace& space, const SearchConfig& cfg);

// Coordinator: keeps up to cfg.workers evaluations in flight until the budget
// is spent, the evaluation cap is reached, or the strategy runs dry.
// In-flight evaluations are cancelled at the budget.
SearchReport RunSearch(Strategy& strategy, const Evaluator& evaluator, const SearchConfig& cfg,
                       const CancelToken& cancel = CancelToken::None());

// Convenience: folds from Rng(cfg.seed).Child(0), the configured strategy,
// the default evaluator.
SearchReport RunSearch(const SearchSpace& space, const Dataset& d, const SearchConfig& cfg,
                       const CancelToken& cancel = CancelToken::None());

}  // namespace imbal

#endif  // IMBAL_SEARCH_HPP_
