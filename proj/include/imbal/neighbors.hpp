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

#ifndef IMBAL_NEIGHBORS_HPP_
#define IMBAL_NEIGHBORS_HPP_

#include <optional>
#include <span>
#include <vector>

#include "imbal/cancel.hpp"
#include "imbal/matrix.hpp"

namespace imbal {

struct Neighbor {
  size_t index;     // position within the reference set
  double distance;  // Minkowski distance (Euclidean for p = 2)
};

// Brute-force k-nearest-neighbor index over a subset of matrix rows.
// Results are ordered by (distance, index), so queries are deterministic.
class NeighborIndex {
 public:
  // References are rows `rows` of `points`; result indices refer to
  // positions in `rows`. The matrix must outlive the index.
  NeighborIndex(const Matrix& points, std::vector<size_t> rows, int p = 2);
  // All rows of `points`.
  explicit NeighborIndex(const Matrix& points, int p = 2);

  size_t size() const { return rows_.size(); }
  size_t row(size_t position) const { return rows_[position]; }

  // k nearest references to `query`. When `exclude_row` names a matrix row
  // it is skipped (self-exclusion). k is clamped to the available count.
  std::vector<Neighbor> Query(std::span<const double> query, size_t k,
                              std::optional<size_t> exclude_row = std::nullopt) const;

  double Distance(std::span<const double> a, std::span<const double> b) const;

 private:
  const Matrix* points_;
  std::vector<size_t> rows_;
  int p_;
};

}  // namespace imbal

#endif  // IMBAL_NEIGHBORS_HPP_
