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

#ifndef IMBAL_SAMPLERS_HPP_
#define IMBAL_SAMPLERS_HPP_

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "imbal/cancel.hpp"
#include "imbal/dataset.hpp"
#include "imbal/rng.hpp"

namespace imbal {

enum class SamplerKind {
  kSmote,
  kBorderlineSmote,
  kAdasyn,
  kEditedNearestNeighbours,
  kCondensedNearestNeighbour,
  kAllKnn,
  kClusterCentroids,
  kTomekLinks,
  kSmoteEnn,
  kSmoteTomek,
};

enum class BorderlineKind { kBorderline1, kBorderline2 };
enum class Voting { kAuto, kHard, kSoft };
enum class SmoteEnnStrategy { kAuto, kMinority, kAll };

// Resampler configuration. Only the fields relevant to `kind` are read.
struct SamplerSpec {
  SamplerKind kind = SamplerKind::kSmote;
  int k_neighbours = 5;
  int m_neighbours = 10;
  BorderlineKind borderline = BorderlineKind::kBorderline1;
  Voting voting = Voting::kAuto;
  SmoteEnnStrategy strategy = SmoteEnnStrategy::kAuto;
  // Neighborhood of the editing step inside SMOTEENN.
  int enn_k_neighbours = 3;

  // Throws ErrorCode::kDomain when a neighbor count lies outside [1, 25].
  void Validate() const;
};

// Optional record of what a sampler did.
struct SamplerTrace {
  // Per output row: the input row it was copied from, or nullopt when the row
  // was synthesized.
  std::vector<std::optional<size_t>> origin;
  // Notable events such as fallbacks ("borderline: empty DANGER set ...").
  std::vector<std::string> events;
};

// Classes an undersampler may edit: those whose count exceeds the smallest
// class count.
std::set<int> EditableClasses(const Dataset& d);

// Dispatches to the concrete sampler. Requires at least two classes and a
// minority of at least two rows.
Dataset ApplySampler(const SamplerSpec& spec, const Dataset& d, Rng& rng,
                     SamplerTrace* trace = nullptr,
                     const CancelToken& cancel = CancelToken::None());

// Oversamplers raise every class to the majority count. Output rows are the
// input rows in order followed by the synthetics. Neighbor counts are clamped
// to what each class can supply.
Dataset Smote(const Dataset& d, int k, Rng& rng, SamplerTrace* trace = nullptr,
              const CancelToken& cancel = CancelToken::None());
Dataset BorderlineSmote(const Dataset& d, int k, int m, BorderlineKind kind, Rng& rng,
                        SamplerTrace* trace = nullptr,
                        const CancelToken& cancel = CancelToken::None());
Dataset Adasyn(const Dataset& d, int k, Rng& rng, SamplerTrace* trace = nullptr,
               const CancelToken& cancel = CancelToken::None());

// Undersamplers. Output rows keep input order. Editing is restricted to
// `editable` classes (default: EditableClasses(d)).
Dataset EditedNearestNeighbours(const Dataset& d, int k,
                                const std::optional<std::set<int>>& editable = std::nullopt,
                                SamplerTrace* trace = nullptr,
                                const CancelToken& cancel = CancelToken::None());
Dataset AllKnn(const Dataset& d, int k_max, SamplerTrace* trace = nullptr,
               const CancelToken& cancel = CancelToken::None());
Dataset CondensedNearestNeighbour(const Dataset& d, int k, Rng& rng, SamplerTrace* trace = nullptr,
                                  const CancelToken& cancel = CancelToken::None());
Dataset ClusterCentroids(const Dataset& d, Voting voting, Rng& rng, SamplerTrace* trace = nullptr,
                         const CancelToken& cancel = CancelToken::None());
Dataset TomekLinks(const Dataset& d, const std::optional<std::set<int>>& editable = std::nullopt,
                   SamplerTrace* trace = nullptr,
                   const CancelToken& cancel = CancelToken::None());

// Combined samplers: SMOTE followed by cleaning. ENN/Tomek edit the classes
// selected by `strategy` relative to the input distribution: auto = classes
// that were not minority, minority = the minority class(es), all = every
// class. SMOTETomek uses the auto selection.
Dataset SmoteEnn(const Dataset& d, SmoteEnnStrategy strategy, int k_smote, int k_enn, Rng& rng,
                 SamplerTrace* trace = nullptr, const CancelToken& cancel = CancelToken::None());
Dataset SmoteTomek(const Dataset& d, int k_smote, Rng& rng, SamplerTrace* trace = nullptr,
                   const CancelToken& cancel = CancelToken::None());

// Lloyd's k-means with random distinct-point initialization, `restarts`
// independent starts (lowest inertia wins) and an iteration cap.
Matrix KMeans(const Matrix& points, size_t k, Rng& rng, int restarts = 10, int max_iter = 300,
              const CancelToken& cancel = CancelToken::None());

}  // namespace imbal

#endif  // IMBAL_SAMPLERS_HPP_
