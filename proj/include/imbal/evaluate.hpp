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

#ifndef IMBAL_EVALUATE_HPP_
#define IMBAL_EVALUATE_HPP_

#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "imbal/cancel.hpp"
#include "imbal/dataset.hpp"
#include "imbal/metrics.hpp"
#include "imbal/pipeline.hpp"

namespace imbal {

// Global search budget. The per-evaluation cap is a tenth of the total.
class BudgetClock {
 public:
  explicit BudgetClock(double total_budget_seconds);

  double total_budget() const { return total_; }
  double per_eval_cap() const { return total_ / 10.0; }
  SteadyClock::time_point started_at() const { return start_; }
  SteadyClock::time_point end() const;
  double elapsed() const;
  double remaining() const;
  bool exhausted() const { return remaining() <= 0.0; }
  // Deadline for an evaluation dispatched now.
  SteadyClock::time_point EvalDeadline() const;

 private:
  double total_;
  SteadyClock::time_point start_;
};

enum class EvalStatus { kOk, kTimeout, kError };
const char* EvalStatusName(EvalStatus status);

struct EvaluationResult {
  std::string pipeline_id;
  std::string pipeline_text;
  MetricId metric = MetricId::kBalancedAccuracy;
  std::vector<double> fold_scores;
  double mean_score = -std::numeric_limits<double>::infinity();
  double wall_clock = 0.0;
  EvalStatus status = EvalStatus::kError;
  std::string error;

  // Search bookkeeping.
  double resource = 1.0;        // training-subsample fraction
  int rung = -1;                // ASHA rung, -1 outside ASHA
  int64_t config_id = -1;       // configuration identity within a search
  int64_t dispatch_index = 0;   // completions observed when dispatched
  int64_t sequence = -1;        // completion order
  double started_at = 0.0;      // seconds since search start
  double finished_at = 0.0;

  bool ok() const { return status == EvalStatus::kOk; }
};

// Total order: ok results by mean_score, every non-ok result strictly below
// every ok result; equal keys compare equal.
bool WorseThan(const EvaluationResult& a, const EvaluationResult& b);

std::string ResultToJson(const EvaluationResult& r, bool include_timing = true);
EvaluationResult ResultFromJson(const std::string& json_text);

// Pipeline trained on one training partition.
class FittedPipeline {
 public:
  std::vector<int> Predict(const Matrix& x) const;
  const FittedModel& model() const { return *model_; }

 private:
  friend FittedPipeline FitPipeline(const Pipeline&, const Dataset&, Rng&, const CancelToken&);
  std::vector<FittedPreprocessor> preprocessors_;
  std::unique_ptr<FittedModel> model_;
};

// Executes the chain on `train`: samplers resample the current training
// data, preprocessors are fitted on it and transform it, then the estimator
// is fitted. Step i draws from rng.Child(i).
FittedPipeline FitPipeline(const Pipeline& p, const Dataset& train, Rng& rng,
                           const CancelToken& cancel = CancelToken::None());

struct EvalOptions {
  MetricId metric = MetricId::kBalancedAccuracy;
  // Positive class for sensitivity; default is the minority class of `d`.
  std::optional<int> positive_class;
  // Fraction of each training partition used (stratified subsample).
  double resource = 1.0;
  // Called with every validation partition exactly as it is scored.
  std::function<void(int fold, const Dataset& validation)> validation_observer;
};

// k-fold evaluation. Fold f uses rng.Child(f). Cancellation (deadline or
// stop) yields status timeout; any other failure yields status error.
EvaluationResult Evaluate(const Pipeline& p, const Dataset& d, const FoldPlan& folds,
                          const EvalOptions& options, Rng& rng,
                          const CancelToken& cancel = CancelToken::None());

// Same, with a cap in seconds measured from the call.
EvaluationResult EvaluateWithCap(const Pipeline& p, const Dataset& d, const FoldPlan& folds,
                                 const EvalOptions& options, double cap_seconds, Rng& rng);

// Fit on all of `train`, score `test` once. Test labels are matched to
// train labels by name.
double HoldoutFinal(const Pipeline& p, const Dataset& train, const Dataset& test, MetricId metric,
                    Rng& rng, std::optional<int> positive_class = std::nullopt);

// Append-only JSON-lines log, flushed after every line. Thread-safe.
class EvaluationLog {
 public:
  explicit EvaluationLog(const std::string& path);
  void Append(const EvaluationResult& r);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
  std::mutex mutex_;
};

std::vector<EvaluationResult> ReadEvaluationLog(const std::string& path);

}  // namespace imbal

#endif  // IMBAL_EVALUATE_HPP_
