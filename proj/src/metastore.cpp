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
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "imbal/error.hpp"
#include "imbal/metalearn.hpp"

namespace imbal {

using nlohmann::json;

namespace {

json NumberOrNull(double v) { return IsNa(v) ? json(nullptr) : json(v); }

std::vector<double> VectorFromJson(const json& j) {
  std::vector<double> out;
  for (const auto& v : j) out.push_back(v.is_null() ? kNa : v.get<double>());
  return out;
}

bool SameValues(const std::vector<double>& a, const std::vector<double>& b) {
  return MetaFeatureVector{a} == MetaFeatureVector{b};
}

}  // namespace

const char* SimilarityModeName(SimilarityMode m) {
  return m == SimilarityMode::kStandardized ? "standardized" : "raw-cosine";
}

SimilarityMode ParseSimilarityMode(const std::string& name) {
  if (name == "standardized") return SimilarityMode::kStandardized;
  if (name == "raw-cosine") return SimilarityMode::kRawCosine;
  Fail(ErrorCode::kInvalidArgument, "unknown similarity '" + name + "' (standardized|raw-cosine)");
}

const char* CandidateModeName(CandidateMode m) {
  return m == CandidateMode::kPerDataset ? "per-dataset" : "total";
}

CandidateMode ParseCandidateMode(const std::string& name) {
  if (name == "per-dataset") return CandidateMode::kPerDataset;
  if (name == "total") return CandidateMode::kTotal;
  Fail(ErrorCode::kInvalidArgument, "unknown candidate mode '" + name + "' (per-dataset|total)");
}

void MetadataStore::Insert(MetaRecord record) {
  if (record.features.values.size() != MetaFeatureNames().size()) {
    Fail(ErrorCode::kSchema, "record '" + record.dataset + "' has " +
                                 std::to_string(record.features.values.size()) + " meta-features, expected " +
                                 std::to_string(MetaFeatureNames().size()));
  }
  const SearchSpace space = SearchSpace::Default();
  for (const auto& p : record.pipelines) {
    ParsePipeline(p.pipeline, space);
    if (!(p.score >= 0.0 && p.score <= 1.0)) {
      Fail(ErrorCode::kInvalidArgument, "record '" + record.dataset + "': score outside [0, 1]");
    }
  }
  std::stable_sort(record.pipelines.begin(), record.pipelines.end(),
                   [](const MetaPipeline& a, const MetaPipeline& b) { return a.score > b.score; });
  records_.push_back(std::move(record));
  Renormalize();
}

void MetadataStore::Renormalize() {
  const size_t dims = MetaFeatureNames().size();
  mean_.assign(dims, kNa);
  stddev_.assign(dims, 1.0);
  for (size_t j = 0; j < dims; ++j) {
    double total = 0.0;
    size_t count = 0;
    for (const auto& r : records_) {
      const double v = r.features.values[j];
      if (IsNa(v)) continue;
      total += v;
      ++count;
    }
    if (count == 0) continue;
    const double mean = total / static_cast<double>(count);
    double ss = 0.0;
    for (const auto& r : records_) {
      const double v = r.features.values[j];
      if (!IsNa(v)) ss += (v - mean) * (v - mean);
    }
    const double sd = std::sqrt(ss / static_cast<double>(count));
    mean_[j] = mean;
    stddev_[j] = sd > 0.0 ? sd : 1.0;
  }
}

bool MetadataStore::operator==(const MetadataStore& o) const {
  return records_ == o.records_ && SameValues(mean_, o.mean_) && SameValues(stddev_, o.stddev_);
}

std::string MetadataStore::ToJson() const {
  json j{{"format", "imbal.metadata_store"},
         {"schema_version", kMetaSchemaVersion},
         {"feature_names", MetaFeatureNames()},
         {"similarity", "cosine of standardized meta-features (raw-cosine selectable)"}};
  json mean = json::array(), sd = json::array();
  for (size_t i = 0; i < mean_.size(); ++i) {
    mean.push_back(NumberOrNull(mean_[i]));
    sd.push_back(stddev_[i]);
  }
  j["normalization"] = {{"mean", mean}, {"stddev", sd}};
  j["records"] = json::array();
  for (const auto& r : records_) {
    json features = json::array();
    for (double v : r.features.values) features.push_back(NumberOrNull(v));
    json pipelines = json::array();
    for (const auto& p : r.pipelines) {
      pipelines.push_back({{"pipeline", p.pipeline}, {"metric", MetricName(p.metric)}, {"score", p.score}});
    }
    j["records"].push_back({{"dataset", r.dataset}, {"features", features}, {"pipelines", pipelines}});
  }
  return j.dump(2);
}

MetadataStore MetadataStore::FromJson(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, std::string("metadata store: ") + e.what());
  }
  if (!j.is_object() || j.value("format", "") != "imbal.metadata_store") {
    Fail(ErrorCode::kSchema, "not a metadata store document");
  }
  const int version = j.value("schema_version", -1);
  if (version != kMetaSchemaVersion) {
    Fail(ErrorCode::kSchema, "metadata store schema version " + std::to_string(version) +
                                 " is not supported (expected " + std::to_string(kMetaSchemaVersion) +
                                 "); rebuild the store with 'meta build'");
  }
  if (j.value("feature_names", std::vector<std::string>{}) != MetaFeatureNames()) {
    Fail(ErrorCode::kSchema, "metadata store feature names differ from this build's schema");
  }
  MetadataStore store;
  try {
    for (const auto& r : j.at("records")) {
      MetaRecord record;
      record.dataset = r.at("dataset").get<std::string>();
      record.features.values = VectorFromJson(r.at("features"));
      for (const auto& p : r.at("pipelines")) {
        record.pipelines.push_back({p.at("pipeline").get<std::string>(),
                                    ParseMetric(p.at("metric").get<std::string>()),
                                    p.at("score").get<double>()});
      }
      store.Insert(std::move(record));
    }
  } catch (const json::exception& e) {
    Fail(ErrorCode::kSchema, std::string("metadata store: ") + e.what());
  }
  return store;
}

void MetadataStore::Save(const std::string& path) const {
  const std::string partial = path + ".partial";
  {
    std::ofstream out(partial, std::ios::binary | std::ios::trunc);
    if (!out) Fail(ErrorCode::kIo, "cannot write " + partial);
    out << ToJson() << '\n';
    if (!out) Fail(ErrorCode::kIo, "write failed: " + partial);
  }
  std::error_code ec;
  std::filesystem::rename(partial, path, ec);
  if (ec) Fail(ErrorCode::kIo, "cannot rename " + partial + ": " + ec.message());
}

MetadataStore MetadataStore::Load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return FromJson(buf.str());
}

double Similarity(const MetaFeatureVector& a, const MetaFeatureVector& b, const MetadataStore& store,
                  SimilarityMode mode) {
  const size_t dims = MetaFeatureNames().size();
  if (a.values.size() != dims || b.values.size() != dims) {
    Fail(ErrorCode::kSchema, "meta-feature vectors do not match the schema");
  }
  const bool standardize = mode == SimilarityMode::kStandardized;
  if (standardize && store.empty()) Fail(ErrorCode::kInvalidArgument, "standardized similarity needs a non-empty store");
  double dot = 0.0, na = 0.0, nb = 0.0;
  size_t shared = 0;
  for (size_t j = 0; j < dims; ++j) {
    double x = a.values[j];
    double y = b.values[j];
    if (IsNa(x) || IsNa(y)) continue;
    if (standardize) {
      if (IsNa(store.mean()[j])) continue;
      x = (x - store.mean()[j]) / store.stddev()[j];
      y = (y - store.mean()[j]) / store.stddev()[j];
    }
    ++shared;
    dot += x * y;
    na += x * x;
    nb += y * y;
  }
  if (shared == 0) Fail(ErrorCode::kDomain, "no meta-feature is available in both vectors");
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

std::vector<RankedRecord> RankRecords(const MetadataStore& store, const MetaFeatureVector& query,
                                      SimilarityMode mode) {
  if (store.empty()) Fail(ErrorCode::kInvalidArgument, "metadata store is empty");
  std::vector<RankedRecord> ranked;
  for (size_t i = 0; i < store.records().size(); ++i) {
    ranked.push_back({i, Similarity(store.records()[i].features, query, store, mode)});
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedRecord& a, const RankedRecord& b) { return a.similarity > b.similarity; });
  return ranked;
}

std::vector<WarmStartCandidate> WarmStartCandidates(const MetadataStore& store, const MetaFeatureVector& query,
                                                    int m, CandidateMode mode, SimilarityMode similarity) {
  if (m < 1) Fail(ErrorCode::kInvalidArgument, "number of warm-start candidates must be >= 1");
  const auto ranked = RankRecords(store, query, similarity);
  const size_t want = static_cast<size_t>(m);
  std::vector<WarmStartCandidate> out;
  auto take = [&](const RankedRecord& r, size_t k) {
    const MetaRecord& rec = store.records()[r.index];
    const MetaPipeline& p = rec.pipelines[k];
    out.push_back({p.pipeline, rec.dataset, p.score, r.similarity});
  };
  if (mode == CandidateMode::kPerDataset) {
    for (size_t round = 0; out.size() < want; ++round) {
      bool any = false;
      for (const auto& r : ranked) {
        if (out.size() == want) break;
        if (round < store.records()[r.index].pipelines.size()) {
          take(r, round);
          any = true;
        }
      }
      if (!any) break;
    }
  } else {
    for (const auto& r : ranked) {
      for (size_t k = 0; k < store.records()[r.index].pipelines.size() && out.size() < want; ++k) take(r, k);
    }
  }
  return out;
}

std::vector<MetaPipeline> TopPipelines(const SearchReport& report, size_t k) {
  std::vector<const EvaluationResult*> ok;
  for (const auto& r : report.history) {
    if (r.ok()) ok.push_back(&r);
  }
  std::stable_sort(ok.begin(), ok.end(), [](const EvaluationResult* a, const EvaluationResult* b) {
    const bool fa = a->resource >= 1.0, fb = b->resource >= 1.0;
    if (fa != fb) return fa;
    if (a->mean_score != b->mean_score) return a->mean_score > b->mean_score;
    return a->sequence < b->sequence;
  });
  std::vector<MetaPipeline> out;
  std::set<std::string> seen;
  for (const auto* r : ok) {
    if (out.size() == k) break;
    if (!seen.insert(r->pipeline_text).second) continue;
    out.push_back({r->pipeline_text, r->metric, r->mean_score});
  }
  return out;
}

}  // namespace imbal
