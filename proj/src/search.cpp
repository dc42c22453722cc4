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

#include "imbal/search.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <json.hpp>
#include <thread>

#include "imbal/error.hpp"

namespace imbal {

using nlohmann::json;

const char* SearchAlgorithmName(SearchAlgorithm a) {
  switch (a) {
    case SearchAlgorithm::kRandom: return "random";
    case SearchAlgorithm::kAsyncEa: return "asyncea";
    case SearchAlgorithm::kAsha: return "asha";
  }
  return "?";
}

SearchAlgorithm ParseSearchAlgorithm(const std::string& name) {
  if (name == "random") return SearchAlgorithm::kRandom;
  if (name == "asyncea") return SearchAlgorithm::kAsyncEa;
  if (name == "asha") return SearchAlgorithm::kAsha;
  Fail(ErrorCode::kInvalidArgument, "unknown search algorithm '" + name + "' (random|asyncea|asha)");
}

void SearchConfig::Validate() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) Fail(ErrorCode::kInvalidArgument, what);
  };
  need(budget_seconds > 0.0, "budget must be > 0");
  need(workers >= 1, "workers must be >= 1");
  need(folds >= 2, "folds must be >= 2");
  need(population_size >= 1, "population size must be >= 1");
  need(tournament_size >= 1, "tournament size must be >= 1");
  need(crossover_rate >= 0.0 && crossover_rate <= 1.0, "crossover rate must lie in [0, 1]");
  need(eta >= 2, "reduction factor must be >= 2");
  need(min_resource > 0.0 && min_resource <= 1.0, "minimum resource must lie in (0, 1]");
  need(max_configs >= 0 && max_evaluations >= 0, "caps must be >= 0");
}

namespace {

void UpdateBest(std::optional<EvaluationResult>& best, const EvaluationResult& r) {
  if (!r.ok()) return;
  if (!best || WorseThan(*best, r)) best = r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Random search

RandomStrategy::RandomStrategy(const SearchSpace& space, const SearchConfig& cfg)
    : space_(space), rng_(Rng(cfg.seed).Child(1)), warm_(cfg.warm_start) {}

std::optional<Job> RandomStrategy::Next() {
  Job job;
  job.config_id = next_id_++;
  if (static_cast<size_t>(job.config_id) < warm_.size()) {
    job.pipeline = warm_[static_cast<size_t>(job.config_id)];
  } else {
    job.pipeline = RandomPipeline(space_, rng_);
  }
  return job;
}

void RandomStrategy::Complete(const Job&, const EvaluationResult& result) { UpdateBest(best_, result); }

// ---------------------------------------------------------------------------
// AsyncEA

AsyncEaStrategy::AsyncEaStrategy(const SearchSpace& space, const SearchConfig& cfg)
    : space_(space), cfg_(cfg), rng_(Rng(cfg.seed).Child(1)) {
  const size_t size = static_cast<size_t>(cfg.population_size);
  for (const auto& p : cfg.warm_start) {
    if (initial_.size() == size) break;
    if (seen_.insert(p.Hash()).second) initial_.push_back(p);
  }
  while (initial_.size() < size) {
    Pipeline p = RandomPipeline(space_, rng_);
    for (int retry = 0; retry < 10 && seen_.contains(p.Hash()); ++retry) p = RandomPipeline(space_, rng_);
    seen_.insert(p.Hash());
    initial_.push_back(std::move(p));
  }
}

const AsyncEaStrategy::Member& AsyncEaStrategy::Tournament() {
  std::vector<size_t> eligible;
  for (size_t i = 0; i < population_.size(); ++i) {
    if (population_[i].result.ok()) eligible.push_back(i);
  }
  size_t best = eligible[static_cast<size_t>(rng_.Below(eligible.size()))];
  for (int t = 1; t < cfg_.tournament_size; ++t) {
    const size_t pick = eligible[static_cast<size_t>(rng_.Below(eligible.size()))];
    if (WorseThan(population_[best].result, population_[pick].result)) best = pick;
  }
  return population_[best];
}

std::optional<Job> AsyncEaStrategy::Next() {
  Job job;
  job.config_id = next_id_++;
  if (initial_dispatched_ < initial_.size()) {
    job.pipeline = initial_[initial_dispatched_++];
    is_initial_[job.config_id] = true;
    events_.push_back("init " + job.pipeline.Id());
    return job;
  }
  const bool any_parent = std::any_of(population_.begin(), population_.end(),
                                      [](const Member& m) { return m.result.ok(); });
  if (!any_parent) {
    job.pipeline = RandomPipeline(space_, rng_);
    events_.push_back("random " + job.pipeline.Id());
  } else {
    std::string event;
    for (int attempt = 0; attempt < 10; ++attempt) {
      if (rng_.Bernoulli(cfg_.crossover_rate)) {
        const Pipeline a = Tournament().pipeline;
        const Pipeline b = Tournament().pipeline;
        job.pipeline = Crossover(a, b, rng_);
        event = "crossover " + a.Id() + " " + b.Id() + " -> " + job.pipeline.Id();
      } else {
        const Pipeline parent = Tournament().pipeline;
        auto mutation = Mutate(parent, space_, rng_);
        job.pipeline = std::move(mutation.pipeline);
        event = std::string("mutate:") + (mutation.move ? MutationMoveName(*mutation.move) : "none") +
                " " + parent.Id() + " -> " + job.pipeline.Id();
      }
      if (!seen_.contains(job.pipeline.Hash())) break;
    }
    events_.push_back(event);
  }
  seen_.insert(job.pipeline.Hash());
  is_initial_[job.config_id] = false;
  return job;
}

void AsyncEaStrategy::Complete(const Job& job, const EvaluationResult& result) {
  UpdateBest(best_, result);
  const bool initial = is_initial_[job.config_id];
  is_initial_.erase(job.config_id);
  // Slots still owed to in-flight initial members are not free.
  const auto pending_initial = static_cast<size_t>(
      std::count_if(is_initial_.begin(), is_initial_.end(), [](const auto& e) { return e.second; }));
  if (initial || population_.size() + pending_initial < static_cast<size_t>(cfg_.population_size)) {
    population_.push_back({job.pipeline, result});
    return;
  }
  size_t worst = 0;
  for (size_t i = 1; i < population_.size(); ++i) {
    if (WorseThan(population_[i].result, population_[worst].result)) worst = i;
  }
  if (WorseThan(population_[worst].result, result)) {
    population_[worst] = {job.pipeline, result};
    events_.push_back("replace " + std::to_string(worst));
  } else {
    events_.push_back("discard " + job.pipeline.Id());
  }
}

// ---------------------------------------------------------------------------
// ASHA

std::vector<double> AshaRungs(double min_resource, int eta) {
  if (!(min_resource > 0.0 && min_resource <= 1.0) || eta < 2) {
    Fail(ErrorCode::kInvalidArgument, "invalid ASHA schedule");
  }
  const int top = static_cast<int>(std::ceil(std::log(1.0 / min_resource) / std::log(eta) - 1e-9));
  std::vector<double> rungs;
  for (int i = 0; i < top; ++i) rungs.push_back(std::min(1.0, min_resource * std::pow(eta, i)));
  rungs.push_back(1.0);
  return rungs;
}

AshaStrategy::AshaStrategy(const SearchSpace& space, const SearchConfig& cfg)
    : space_(&space), cfg_(cfg), rng_(Rng(cfg.seed).Child(1)), warm_(cfg.warm_start) {
  rungs_ = AshaRungs(cfg.min_resource, cfg.eta);
  completed_.resize(rungs_.size());
  promoted_.resize(rungs_.size());
}

AshaStrategy::AshaStrategy(std::vector<Pipeline> configs, const SearchConfig& cfg)
    : cfg_(cfg), rng_(Rng(cfg.seed).Child(1)), scripted_(std::move(configs)) {
  rungs_ = AshaRungs(cfg.min_resource, cfg.eta);
  completed_.resize(rungs_.size());
  promoted_.resize(rungs_.size());
}

namespace {

template <typename E>
std::vector<E> Ranked(std::vector<E> entries) {
  std::sort(entries.begin(), entries.end(), [](const E& a, const E& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.order < b.order;
  });
  return entries;
}

}  // namespace

std::optional<Job> AshaStrategy::Next() {
  const int top = static_cast<int>(rungs_.size()) - 1;
  for (int k = top - 1; k >= 0; --k) {
    const auto ranked = Ranked(completed_[static_cast<size_t>(k)]);
    const size_t quota = ranked.size() / static_cast<size_t>(cfg_.eta);
    for (size_t i = 0; i < quota; ++i) {
      const Entry& e = ranked[i];
      if (!std::isfinite(e.score) || promoted_[static_cast<size_t>(k)].contains(e.config_id)) continue;
      promoted_[static_cast<size_t>(k)].insert(e.config_id);
      Job job;
      job.pipeline = configs_.at(e.config_id);
      job.config_id = e.config_id;
      job.rung = k + 1;
      job.resource = rungs_[static_cast<size_t>(k + 1)];
      return job;
    }
  }
  if (cfg_.max_configs > 0 && next_id_ >= cfg_.max_configs) return std::nullopt;
  Job job;
  job.config_id = next_id_;
  if (space_ == nullptr) {
    if (static_cast<size_t>(next_id_) >= scripted_.size()) return std::nullopt;
    job.pipeline = scripted_[static_cast<size_t>(next_id_)];
  } else if (static_cast<size_t>(next_id_) < warm_.size()) {
    job.pipeline = warm_[static_cast<size_t>(next_id_)];
  } else {
    job.pipeline = RandomPipeline(*space_, rng_);
  }
  ++next_id_;
  job.rung = 0;
  job.resource = rungs_[0];
  configs_[job.config_id] = job.pipeline;
  return job;
}

void AshaStrategy::Complete(const Job& job, const EvaluationResult& result) {
  const double score = result.ok() ? result.mean_score : -std::numeric_limits<double>::infinity();
  completed_.at(static_cast<size_t>(job.rung)).push_back({job.config_id, score, completions_++});
  UpdateBest(best_any_, result);
  if (job.rung == static_cast<int>(rungs_.size()) - 1) UpdateBest(best_top_, result);
}

std::optional<EvaluationResult> AshaStrategy::Incumbent() const {
  return best_top_ ? best_top_ : best_any_;
}

std::vector<int> AshaStrategy::promotions() const {
  std::vector<int> out(rungs_.size(), 0);
  for (size_t k = 0; k + 1 < rungs_.size(); ++k) out[k + 1] = static_cast<int>(promoted_[k].size());
  return out;
}

AshaAuditReport AuditAsha(std::vector<EvaluationResult> history, int eta) {
  std::sort(history.begin(), history.end(),
            [](const EvaluationResult& a, const EvaluationResult& b) { return a.sequence < b.sequence; });
  AshaAuditReport report;
  int max_rung = 0;
  for (const auto& r : history) max_rung = std::max(max_rung, r.rung);
  report.promotions.assign(static_cast<size_t>(max_rung) + 1, 0);
  std::set<std::pair<int64_t, int>> occupied;
  struct Entry {
    int64_t config_id;
    double score;
    int64_t order;
  };
  auto violation = [&](const std::string& what) {
    report.ok = false;
    report.violations.push_back(what);
  };
  for (const auto& r : history) {
    if (r.rung < 0) {
      violation("result " + std::to_string(r.sequence) + " has no rung");
      continue;
    }
    if (!occupied.insert({r.config_id, r.rung}).second) {
      violation("config " + std::to_string(r.config_id) + " evaluated twice at rung " + std::to_string(r.rung));
    }
    if (r.rung == 0) continue;
    ++report.promotions[static_cast<size_t>(r.rung)];
    std::vector<Entry> lower;
    for (const auto& q : history) {
      if (q.sequence >= r.dispatch_index) break;
      if (q.rung == r.rung - 1) {
        lower.push_back({q.config_id, q.ok() ? q.mean_score : -std::numeric_limits<double>::infinity(), q.sequence});
      }
    }
    const auto ranked = Ranked(lower);
    const size_t quota = ranked.size() / static_cast<size_t>(eta);
    bool backed = false;
    for (size_t i = 0; i < quota; ++i) {
      if (ranked[i].config_id == r.config_id && std::isfinite(ranked[i].score)) backed = true;
    }
    if (!backed) {
      violation("config " + std::to_string(r.config_id) + " entered rung " + std::to_string(r.rung) +
                " at dispatch " + std::to_string(r.dispatch_index) + " without a top-1/" +
                std::to_string(eta) + " result at rung " + std::to_string(r.rung - 1));
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Reports

std::string SearchReport::ToJson(bool include_timing) const {
  json j{{"format", "imbal.search_report"},
         {"version", 1},
         {"algorithm", SearchAlgorithmName(algorithm)},
         {"metric", MetricName(metric)},
         {"balanced_accuracy_definition", "unweighted mean of per-class recall"},
         {"budget_seconds", budget_seconds},
         {"workers", workers},
         {"seed", seed},
         {"folds", folds},
         {"no_result", no_result},
         {"evaluations_completed", evaluations_completed},
         {"evaluations_timed_out", evaluations_timed_out},
         {"evaluations_failed", evaluations_failed}};
  if (algorithm == SearchAlgorithm::kAsha) j["asha_resource"] = "training-subsample fraction";
  j["best"] = best ? json::parse(ResultToJson(*best, include_timing)) : json(nullptr);
  j["history"] = json::array();
  for (const auto& r : history) j["history"].push_back(json::parse(ResultToJson(r, include_timing)));
  if (include_timing) j["wall_clock"] = wall_clock;
  return j.dump(2);
}

SearchReport SearchReportFromJson(const std::string& json_text) {
  try {
    const json j = json::parse(json_text);
    if (j.value("format", "") != "imbal.search_report") Fail(ErrorCode::kSchema, "not a search report");
    SearchReport r;
    r.algorithm = ParseSearchAlgorithm(j.at("algorithm").get<std::string>());
    r.metric = ParseMetric(j.at("metric").get<std::string>());
    r.budget_seconds = j.at("budget_seconds").get<double>();
    r.workers = j.at("workers").get<int>();
    r.seed = j.at("seed").get<uint64_t>();
    r.folds = j.value("folds", 5);
    r.no_result = j.at("no_result").get<bool>();
    r.evaluations_completed = j.at("evaluations_completed").get<int64_t>();
    r.evaluations_timed_out = j.at("evaluations_timed_out").get<int64_t>();
    r.evaluations_failed = j.value("evaluations_failed", int64_t{0});
    r.wall_clock = j.value("wall_clock", 0.0);
    if (!j.at("best").is_null()) r.best = ResultFromJson(j.at("best").dump());
    for (const auto& h : j.at("history")) r.history.push_back(ResultFromJson(h.dump()));
    return r;
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, std::string("search report: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Coordinator

Evaluator MakeEvaluator(const Dataset& d, const FoldPlan& folds, const SearchConfig& cfg,
                        std::function<void(int, const Dataset&)> validation_observer) {
  const int positive = ComputeClassDistribution(d).minority_class();
  return [&d, &folds, metric = cfg.metric, seed = cfg.seed, positive,
          observer = std::move(validation_observer)](const Job& job, const CancelToken& cancel) {
    EvalOptions options;
    options.metric = metric;
    options.positive_class = positive;
    options.resource = job.resource;
    options.validation_observer = observer;
    Rng rng(HashCombine(HashCombine(seed, job.pipeline.Hash()), std::bit_cast<uint64_t>(job.resource)));
    return Evaluate(job.pipeline, d, folds, options, rng, cancel);
  };
}

std::unique_ptr<Strategy> MakeStrategy(const SearchSpace& space, const SearchConfig& cfg) {
  switch (cfg.algorithm) {
    case SearchAlgorithm::kRandom: return std::make_unique<RandomStrategy>(space, cfg);
    case SearchAlgorithm::kAsyncEa: return std::make_unique<AsyncEaStrategy>(space, cfg);
    case SearchAlgorithm::kAsha: return std::make_unique<AshaStrategy>(space, cfg);
  }
  Fail(ErrorCode::kInvalidArgument, "unknown search algorithm");
}

namespace {

double Seconds(SteadyClock::time_point from, SteadyClock::time_point to) {
  return std::chrono::duration<double>(to - from).count();
}

EvaluationResult SafeEvaluate(const Evaluator& evaluator, const Job& job, const CancelToken& token) {
  try {
    return evaluator(job, token);
  } catch (const Cancelled&) {
    EvaluationResult r;
    r.status = EvalStatus::kTimeout;
    r.error = "evaluation cancelled at its deadline";
    return r;
  } catch (const std::exception& e) {
    EvaluationResult r;
    r.status = EvalStatus::kError;
    r.error = e.what();
    return r;
  }
}

}  // namespace

SearchReport RunSearch(Strategy& strategy, const Evaluator& evaluator, const SearchConfig& cfg,
                       const CancelToken& cancel) {
  cfg.Validate();
  const BudgetClock clock(cfg.budget_seconds);
  std::unique_ptr<EvaluationLog> log;
  if (!cfg.log_path.empty()) log = std::make_unique<EvaluationLog>(cfg.log_path);

  SearchReport report;
  report.algorithm = cfg.algorithm;
  report.metric = cfg.metric;
  report.budget_seconds = cfg.budget_seconds;
  report.workers = cfg.workers;
  report.seed = cfg.seed;
  report.folds = cfg.folds;

  struct Flight {
    Job job;
    CancelToken token;
    int64_t dispatch_index = 0;
    SteadyClock::time_point started;
  };
  std::mutex mutex;
  std::condition_variable cv;
  std::deque<std::pair<size_t, EvaluationResult>> done;
  std::vector<std::optional<Flight>> slots(static_cast<size_t>(cfg.workers));
  std::vector<std::thread> threads(static_cast<size_t>(cfg.workers));
  size_t in_flight = 0;
  int64_t dispatched = 0;
  int64_t completions = 0;

  auto record = [&](Flight& flight, EvaluationResult result) {
    const auto finished = SteadyClock::now();
    result.pipeline_text = flight.job.pipeline.ToText();
    result.pipeline_id = flight.job.pipeline.Id();
    result.metric = cfg.metric;
    result.config_id = flight.job.config_id;
    result.rung = flight.job.rung;
    result.resource = flight.job.resource;
    result.dispatch_index = flight.dispatch_index;
    result.sequence = completions++;
    result.started_at = Seconds(clock.started_at(), flight.started);
    result.finished_at = Seconds(clock.started_at(), finished);
    if (result.status == EvalStatus::kOk) ++report.evaluations_completed;
    if (result.status == EvalStatus::kTimeout) ++report.evaluations_timed_out;
    if (result.status == EvalStatus::kError) ++report.evaluations_failed;
    strategy.Complete(flight.job, result);
    if (log) log->Append(result);
    report.history.push_back(std::move(result));
    const auto incumbent = strategy.Incumbent();
    report.incumbent_trace.push_back(incumbent ? incumbent->mean_score
                                               : -std::numeric_limits<double>::infinity());
  };

  auto can_dispatch = [&] {
    return !clock.exhausted() && !cancel.Expired() &&
           (cfg.max_evaluations == 0 || dispatched < cfg.max_evaluations);
  };

  while (true) {
    bool dry = false;
    while (in_flight < slots.size() && can_dispatch()) {
      auto job = strategy.Next();
      if (!job) {
        dry = true;
        break;
      }
      Flight flight{std::move(*job), cancel.Linked(clock.EvalDeadline()), completions, SteadyClock::now()};
      ++dispatched;
      if (cfg.workers == 1) {
        EvaluationResult result = SafeEvaluate(evaluator, flight.job, flight.token);
        record(flight, std::move(result));
        continue;
      }
      size_t slot = 0;
      while (slots[slot]) ++slot;
      slots[slot] = std::move(flight);
      ++in_flight;
      if (threads[slot].joinable()) threads[slot].join();
      threads[slot] = std::thread([&, slot, job = slots[slot]->job, token = slots[slot]->token] {
        EvaluationResult result = SafeEvaluate(evaluator, job, token);
        std::lock_guard<std::mutex> lock(mutex);
        done.emplace_back(slot, std::move(result));
        cv.notify_all();
      });
    }
    if (in_flight == 0) break;
    (void)dry;
    std::unique_lock<std::mutex> lock(mutex);
    cv.wait_until(lock, clock.end(), [&] { return !done.empty(); });
    if (done.empty()) {
      // Budget spent: cancel everything in flight and collect the results.
      for (auto& s : slots) {
        if (s) s->token.Stop();
      }
      cv.wait(lock, [&] { return done.size() == in_flight; });
    }
    auto batch = std::move(done);
    done.clear();
    lock.unlock();
    for (auto& [slot, result] : batch) {
      record(*slots[slot], std::move(result));
      slots[slot].reset();
      --in_flight;
    }
    if (clock.exhausted() || cancel.Expired()) {
      for (auto& s : slots) {
        if (s) s->token.Stop();
      }
    }
  }
  for (auto& t : threads) {
    if (t.joinable()) t.join();
  }
  report.best = strategy.Incumbent();
  report.no_result = !report.best.has_value();
  report.wall_clock = clock.elapsed();
  return report;
}

SearchReport RunSearch(const SearchSpace& space, const Dataset& d, const SearchConfig& cfg,
                       const CancelToken& cancel) {
  cfg.Validate();
  Rng fold_rng = Rng(cfg.seed).Child(0);
  const FoldPlan folds = StratifiedFolds(d, cfg.folds, fold_rng);
  auto strategy = MakeStrategy(space, cfg);
  return RunSearch(*strategy, MakeEvaluator(d, folds, cfg), cfg, cancel);
}

}  // namespace imbal
