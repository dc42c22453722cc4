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

#ifndef IMBAL_METALEARN_HPP_
#define IMBAL_METALEARN_HPP_

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "imbal/dataset.hpp"
#include "imbal/metrics.hpp"
#include "imbal/search.hpp"

namespace imbal {

inline constexpr int kMetaSchemaVersion = 1;

// Not-available marker for a meta-feature.
inline constexpr double kNa = std::numeric_limits<double>::quiet_NaN();
inline bool IsNa(double v) { return std::isnan(v); }

// Names of the fixed meta-feature schema, in order.
const std::vector<std::string>& MetaFeatureNames();
size_t MetaFeatureIndex(std::string_view name);

struct MetaFeatureVector {
  std::vector<double> values;  // MetaFeatureNames() order; kNa when unavailable

  double operator[](std::string_view name) const { return values.at(MetaFeatureIndex(name)); }
  bool operator==(const MetaFeatureVector& o) const;
};

// Requires at least 4 rows. Landmarkers use 2-fold stratified CV drawn from
// `rng`; out-of-fold predictions are pooled before scoring.
MetaFeatureVector ExtractMetaFeatures(const Dataset& d, Rng& rng);

// Helpers exposed for testing.
double EntropyBits(std::span<const size_t> counts);
// Equal-width binning into `bins` buckets over [min, max]; a constant column
// lands in bucket 0.
std::vector<int> EqualWidthBins(std::span<const double> values, int bins);
double MutualInformationBits(std::span<const int> a, std::span<const int> b);
// Linear interpolation between order statistics (numpy's default).
double Quantile(std::vector<double> values, double q);
// Mann-Whitney AUC of `scores` for `positive` vs rest, ties averaged.
double RankAuc(std::span<const double> scores, std::span<const int> labels, int positive);
double CohenKappa(const ConfusionMatrix& cm);

struct MetaPipeline {
  std::string pipeline;
  MetricId metric = MetricId::kBalancedAccuracy;
  double score = 0.0;

  bool operator==(const MetaPipeline&) const = default;
};

struct MetaRecord {
  std::string dataset;
  MetaFeatureVector features;
  std::vector<MetaPipeline> pipelines;  // best first

  bool operator==(const MetaRecord&) const = default;
};

enum class SimilarityMode { kStandardized, kRawCosine };
const char* SimilarityModeName(SimilarityMode m);
SimilarityMode ParseSimilarityMode(const std::string& name);

class MetadataStore {
 public:
  // Appends the record (pipelines re-sorted best first) and recomputes the
  // per-feature mean and population standard deviation. Pipelines must parse
  // under the default grammar and scores must lie in [0, 1].
  void Insert(MetaRecord record);

  const std::vector<MetaRecord>& records() const { return records_; }
  bool empty() const { return records_.empty(); }
  // kNa where no record has the feature; a zero deviation is stored as 1.
  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& stddev() const { return stddev_; }

  std::string ToJson() const;
  static MetadataStore FromJson(const std::string& json_text);
  void Save(const std::string& path) const;
  static MetadataStore Load(const std::string& path);

  bool operator==(const MetadataStore& o) const;

 private:
  void Renormalize();

  std::vector<MetaRecord> records_;
  std::vector<double> mean_;
  std::vector<double> stddev_;
};

// Cosine of the two vectors after standardization by the store statistics
// (or of the raw vectors). Coordinates unavailable in either are dropped.
// Zero norm gives 0.
double Similarity(const MetaFeatureVector& a, const MetaFeatureVector& b,
                  const MetadataStore& store, SimilarityMode mode = SimilarityMode::kStandardized);

struct RankedRecord {
  size_t index = 0;
  double similarity = 0.0;
};
// Most similar first; ties by insertion order.
std::vector<RankedRecord> RankRecords(const MetadataStore& store, const MetaFeatureVector& query,
                                      SimilarityMode mode = SimilarityMode::kStandardized);

enum class CandidateMode { kPerDataset, kTotal };
const char* CandidateModeName(CandidateMode m);
CandidateMode ParseCandidateMode(const std::string& name);

struct WarmStartCandidate {
  std::string pipeline;
  std::string dataset;
  double score = 0.0;
  double similarity = 0.0;
};

// kPerDataset: the best pipeline of each of the m most similar records, then
// next-best pipelines round-robin when records run out. kTotal: pipelines of
// the most similar record in score order, then the next record, up to m.
std::vector<WarmStartCandidate> WarmStartCandidates(
    const MetadataStore& store, const MetaFeatureVector& query, int m = 10,
    CandidateMode mode = CandidateMode::kPerDataset,
    SimilarityMode similarity = SimilarityMode::kStandardized);

// Best `k` distinct ok pipelines of a search, full-resource results first.
std::vector<MetaPipeline> TopPipelines(const SearchReport& report, size_t k);

}  // namespace imbal

#endif  // IMBAL_METALEARN_HPP_
