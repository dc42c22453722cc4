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

#include "imbal/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

namespace imbal {

NeighborIndex::NeighborIndex(const Matrix& points, std::vector<size_t> rows, int p)
    : points_(&points), rows_(std::move(rows)), p_(p) {}

NeighborIndex::NeighborIndex(const Matrix& points, int p) : points_(&points), p_(p) {
  rows_.resize(points.rows());
  std::iota(rows_.begin(), rows_.end(), size_t{0});
}

double NeighborIndex::Distance(std::span<const double> a, std::span<const double> b) const {
  double acc = 0.0;
  if (p_ == 1) {
    for (size_t j = 0; j < a.size(); ++j) acc += std::abs(a[j] - b[j]);
    return acc;
  }
  for (size_t j = 0; j < a.size(); ++j) {
    const double diff = a[j] - b[j];
    acc += diff * diff;
  }
  return std::sqrt(acc);
}

std::vector<Neighbor> NeighborIndex::Query(std::span<const double> query, size_t k,
                                           std::optional<size_t> exclude_row) const {
  std::vector<Neighbor> all;
  all.reserve(rows_.size());
  for (size_t pos = 0; pos < rows_.size(); ++pos) {
    if (exclude_row && rows_[pos] == *exclude_row) continue;
    all.push_back({pos, Distance(query, points_->row(rows_[pos]))});
  }
  k = std::min(k, all.size());
  auto less = [](const Neighbor& a, const Neighbor& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
  };
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), less);
  all.resize(k);
  return all;
}

}  // namespace imbal
