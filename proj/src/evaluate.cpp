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

#include "imbal/evaluate.hpp"

#include <cmath>
#include <json.hpp>
#include <map>
#include <numeric>

#include "imbal/error.hpp"

namespace imbal {

using nlohmann::json;

BudgetClock::BudgetClock(double total_budget_seconds)
    : total_(total_budget_seconds), start_(SteadyClock::now()) {
  if (!(total_budget_seconds > 0.0)) Fail(ErrorCode::kInvalidArgument, "budget must be > 0");
}

SteadyClock::time_point BudgetClock::end() const {
  return start_ + std::chrono::duration_cast<SteadyClock::duration>(std::chrono::duration<double>(total_));
}

double BudgetClock::elapsed() const {
  return std::chrono::duration<double>(SteadyClock::now() - start_).count();
}

double BudgetClock::remaining() const { return std::max(0.0, total_ - elapsed()); }

SteadyClock::time_point BudgetClock::EvalDeadline() const {
  const auto cap = std::chrono::duration_cast<SteadyClock::duration>(
      std::chrono::duration<double>(per_eval_cap()));
  return std::min(SteadyClock::now() + cap, end());
}

const char* EvalStatusName(EvalStatus status) {
  switch (status) {
    case EvalStatus::kOk: return "ok";
    case EvalStatus::kTimeout: return "timeout";
    case EvalStatus::kError: return "error";
  }
  return "?";
}

bool WorseThan(const EvaluationResult& a, const EvaluationResult& b) {
  if (a.ok() != b.ok()) return !a.ok();
  if (!a.ok()) return false;
  return a.mean_score < b.mean_score;
}

std::string ResultToJson(const EvaluationResult& r, bool include_timing) {
  json j{{"pipeline_id", r.pipeline_id},
         {"pipeline", r.pipeline_text},
         {"metric", MetricName(r.metric)},
         {"fold_scores", r.fold_scores},
         {"mean_score", r.ok() ? json(r.mean_score) : json(nullptr)},
         {"status", EvalStatusName(r.status)},
         {"error", r.error},
         {"resource", r.resource},
         {"rung", r.rung},
         {"config_id", r.config_id},
         {"dispatch_index", r.dispatch_index},
         {"sequence", r.sequence}};
  if (include_timing) {
    j["wall_clock"] = r.wall_clock;
    j["started_at"] = r.started_at;
    j["finished_at"] = r.finished_at;
  }
  return j.dump();
}

EvaluationResult ResultFromJson(const std::string& json_text) {
  try {
    const json j = json::parse(json_text);
    EvaluationResult r;
    r.pipeline_id = j.at("pipeline_id").get<std::string>();
    r.pipeline_text = j.at("pipeline").get<std::string>();
    r.metric = ParseMetric(j.at("metric").get<std::string>());
    r.fold_scores = j.at("fold_scores").get<std::vector<double>>();
    const auto status = j.at("status").get<std::string>();
    r.status = status == "ok" ? EvalStatus::kOk : status == "timeout" ? EvalStatus::kTimeout : EvalStatus::kError;
    if (r.ok()) r.mean_score = j.at("mean_score").get<double>();
    r.error = j.value("error", "");
    r.resource = j.value("resource", 1.0);
    r.rung = j.value("rung", -1);
    r.config_id = j.value("config_id", int64_t{-1});
    r.dispatch_index = j.value("dispatch_index", int64_t{0});
    r.sequence = j.value("sequence", int64_t{-1});
    r.wall_clock = j.value("wall_clock", 0.0);
    r.started_at = j.value("started_at", 0.0);
    r.finished_at = j.value("finished_at", 0.0);
    return r;
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, std::string("evaluation record: ") + e.what());
  }
}

std::vector<int> FittedPipeline::Predict(const Matrix& x) const {
  if (preprocessors_.empty()) return model_->Predict(x);
  Matrix current = preprocessors_.front().Transform(x);
  for (size_t i = 1; i < preprocessors_.size(); ++i) current = preprocessors_[i].Transform(current);
  return model_->Predict(current);
}

FittedPipeline FitPipeline(const Pipeline& p, const Dataset& train, Rng& rng, const CancelToken& cancel) {
  ValidatePipeline(p, SearchSpace::Default());
  FittedPipeline out;
  Dataset current = train;
  for (size_t i = 0; i + 1 < p.steps.size(); ++i) {
    cancel.Check();
    Rng step_rng = rng.Child(i);
    const Step& step = p.steps[i];
    if (CategoryOf(step) == StepCategory::kSampler) {
      current = ApplySampler(ToSamplerSpec(step), current, step_rng, nullptr, cancel);
    } else {
      auto fitted = FitPreprocessor(ToPreprocessorSpec(step), current.features);
      current.features = fitted.Transform(current.features);
      current.columns = NumericColumns(current.features.cols());
      out.preprocessors_.push_back(std::move(fitted));
    }
  }
  Rng est_rng = rng.Child(p.steps.size() - 1);
  out.model_ = Fit(ToEstimatorSpec(p.estimator()), current, est_rng, cancel);
  return out;
}

EvaluationResult Evaluate(const Pipeline& p, const Dataset& d, const FoldPlan& folds,
                          const EvalOptions& options, Rng& rng, const CancelToken& cancel) {
  const auto start = SteadyClock::now();
  EvaluationResult r;
  r.pipeline_text = p.ToText();
  r.pipeline_id = p.Id();
  r.metric = options.metric;
  r.resource = options.resource;
  try {
    if (folds.assignments.size() != d.rows()) {
      Fail(ErrorCode::kInvalidArgument, "fold plan does not match the dataset");
    }
    const int positive = options.positive_class.value_or(ComputeClassDistribution(d).minority_class());
    for (int f = 0; f < folds.k; ++f) {
      cancel.Check();
      Rng fold_rng = rng.Child(static_cast<uint64_t>(f));
      auto train_rows = folds.TrainIndices(f);
      if (options.resource < 1.0) {
        Rng sub_rng = fold_rng.Child(1000);
        train_rows = StratifiedSubsample(d.labels, train_rows, options.resource, sub_rng);
      }
      const Dataset train = d.Subset(train_rows);
      const Dataset validation = d.Subset(folds.ValidationIndices(f));
      if (validation.rows() == 0) continue;
      const FittedPipeline fitted = FitPipeline(p, train, fold_rng, cancel);
      if (options.validation_observer) options.validation_observer(f, validation);
      const auto predicted = fitted.Predict(validation.features);
      r.fold_scores.push_back(Score(options.metric, Confusion(validation.labels, predicted), positive));
    }
    if (r.fold_scores.empty()) Fail(ErrorCode::kRuntime, "no fold produced a score");
    r.mean_score = std::accumulate(r.fold_scores.begin(), r.fold_scores.end(), 0.0) /
                   static_cast<double>(r.fold_scores.size());
    r.status = EvalStatus::kOk;
  } catch (const Cancelled&) {
    r.status = EvalStatus::kTimeout;
    r.error = "evaluation cancelled at its deadline";
  } catch (const std::exception& e) {
    r.status = EvalStatus::kError;
    r.error = e.what();
  }
  if (!r.ok()) {
    r.fold_scores.clear();
    r.mean_score = -std::numeric_limits<double>::infinity();
  }
  r.wall_clock = std::chrono::duration<double>(SteadyClock::now() - start).count();
  return r;
}

EvaluationResult EvaluateWithCap(const Pipeline& p, const Dataset& d, const FoldPlan& folds,
                                 const EvalOptions& options, double cap_seconds, Rng& rng) {
  const auto deadline =
      SteadyClock::now() +
      std::chrono::duration_cast<SteadyClock::duration>(std::chrono::duration<double>(cap_seconds));
  return Evaluate(p, d, folds, options, rng, CancelToken(deadline));
}

double HoldoutFinal(const Pipeline& p, const Dataset& train, const Dataset& test, MetricId metric,
                    Rng& rng, std::optional<int> positive_class) {
  if (test.cols() != train.cols()) Fail(ErrorCode::kInvalidArgument, "train/test column counts differ");
  std::map<std::string, int> code;
  for (size_t i = 0; i < train.label_names.size(); ++i) code[train.label_names[i]] = static_cast<int>(i);
  std::vector<int> truth(test.rows());
  int next = static_cast<int>(train.label_names.size());
  for (size_t i = 0; i < test.rows(); ++i) {
    const std::string& name = test.label_names.at(static_cast<size_t>(test.labels[i]));
    auto it = code.find(name);
    if (it == code.end()) it = code.emplace(name, next++).first;
    truth[i] = it->second;
  }
  const FittedPipeline fitted = FitPipeline(p, train, rng);
  const auto predicted = fitted.Predict(test.features);
  const int positive = positive_class.value_or(ComputeClassDistribution(train).minority_class());
  return Score(metric, Confusion(truth, predicted), positive);
}

EvaluationLog::EvaluationLog(const std::string& path) : path_(path), out_(path, std::ios::app) {
  if (!out_) Fail(ErrorCode::kIo, "cannot open evaluation log " + path);
}

void EvaluationLog::Append(const EvaluationResult& r) {
  std::lock_guard<std::mutex> lock(mutex_);
  out_ << ResultToJson(r) << '\n';
  out_.flush();
}

std::vector<EvaluationResult> ReadEvaluationLog(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot read evaluation log " + path);
  std::vector<EvaluationResult> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(ResultFromJson(line));
  }
  return out;
}

}  // namespace imbal
