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

#include "imbal/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "imbal/error.hpp"
#include "imbal/neighbors.hpp"

namespace imbal {

void SamplerSpec::Validate() const {
  auto check = [](const char* name, int v) {
    if (v < 1 || v > 25) {
      Fail(ErrorCode::kDomain, std::string(name) + "=" + std::to_string(v) + " outside [1, 25]");
    }
  };
  switch (kind) {
    case SamplerKind::kSmote:
    case SamplerKind::kAdasyn:
    case SamplerKind::kEditedNearestNeighbours:
    case SamplerKind::kCondensedNearestNeighbour:
    case SamplerKind::kAllKnn:
    case SamplerKind::kSmoteTomek:
      check("k_neighbours", k_neighbours);
      break;
    case SamplerKind::kBorderlineSmote:
      check("k_neighbours", k_neighbours);
      check("m_neighbours", m_neighbours);
      break;
    case SamplerKind::kSmoteEnn:
      check("k_neighbours", k_neighbours);
      check("enn_k_neighbours", enn_k_neighbours);
      break;
    case SamplerKind::kClusterCentroids:
    case SamplerKind::kTomekLinks:
      break;
  }
}

namespace {

using Groups = std::map<int, std::vector<size_t>>;

Groups GroupRows(const Dataset& d) {
  Groups groups;
  for (size_t i = 0; i < d.rows(); ++i) groups[d.labels[i]].push_back(i);
  return groups;
}

// Accumulates output rows plus their provenance.
class Builder {
 public:
  explicit Builder(size_t cols) : features_(0, cols) {}

  void Copy(const Dataset& d, size_t row) {
    features_.AppendRow(d.features.row(row));
    labels_.push_back(d.labels[row]);
    origin_.emplace_back(row);
  }

  void Synthesize(const Dataset& d, size_t x, size_t z, double u, int label) {
    auto a = d.features.row(x);
    auto b = d.features.row(z);
    scratch_.resize(a.size());
    for (size_t j = 0; j < a.size(); ++j) scratch_[j] = a[j] + u * (b[j] - a[j]);
    features_.AppendRow(scratch_);
    labels_.push_back(label);
    origin_.emplace_back(std::nullopt);
  }

  void AppendRaw(std::span<const double> values, int label) {
    features_.AppendRow(values);
    labels_.push_back(label);
    origin_.emplace_back(std::nullopt);
  }

  Dataset Finish(const Dataset& source, SamplerTrace* trace) {
    if (trace) trace->origin = std::move(origin_);
    Dataset out = source.WithRows(std::move(features_), std::move(labels_));
    out.columns = source.columns;
    return out;
  }

 private:
  Matrix features_;
  std::vector<int> labels_;
  std::vector<std::optional<size_t>> origin_;
  std::vector<double> scratch_;
};

Builder CopyAll(const Dataset& d) {
  Builder b(d.cols());
  for (size_t i = 0; i < d.rows(); ++i) b.Copy(d, i);
  return b;
}

void Note(SamplerTrace* trace, std::string event) {
  if (trace) trace->events.push_back(std::move(event));
}

// Compose two traces: `second` was computed on the output of `first`.
void Compose(SamplerTrace* trace, const SamplerTrace& first, SamplerTrace second) {
  if (!trace) return;
  std::vector<std::optional<size_t>> origin;
  origin.reserve(second.origin.size());
  for (const auto& o : second.origin) {
    origin.push_back(o ? first.origin[*o] : std::nullopt);
  }
  trace->origin = std::move(origin);
  trace->events = first.events;
  trace->events.insert(trace->events.end(), second.events.begin(), second.events.end());
}

// Within-class neighbor lists: result[p] = positions (into members) of the k
// nearest other members of members[p].
std::vector<std::vector<size_t>> ClassNeighbors(const Dataset& d, const std::vector<size_t>& members,
                                                size_t k, const CancelToken& cancel) {
  NeighborIndex index(d.features, members);
  std::vector<std::vector<size_t>> out(members.size());
  for (size_t p = 0; p < members.size(); ++p) {
    cancel.Check();
    for (const auto& nb : index.Query(d.features.row(members[p]), k, members[p])) {
      out[p].push_back(nb.index);
    }
  }
  return out;
}

void RequireOversamplable(const std::vector<size_t>& members, int label) {
  if (members.size() < 2) {
    Fail(ErrorCode::kInvalidArgument,
         "class " + std::to_string(label) + " has fewer than 2 samples; cannot interpolate");
  }
}

// Plain SMOTE for one class: `needed` synthetics, each from a uniformly drawn
// member x and one of its k nearest same-class neighbors z, x + u (z - x),
// u ~ U[0, 1).
void SmoteClass(const Dataset& d, const std::vector<size_t>& members, int label, int k,
                size_t needed, Rng& rng, Builder& out, const CancelToken& cancel) {
  if (needed == 0) return;
  RequireOversamplable(members, label);
  const size_t k_eff = std::min<size_t>(static_cast<size_t>(k), members.size() - 1);
  const auto neighbors = ClassNeighbors(d, members, k_eff, cancel);
  for (size_t s = 0; s < needed; ++s) {
    if (s % 256 == 0) cancel.Check();
    const size_t p = static_cast<size_t>(rng.Below(members.size()));
    const size_t q = neighbors[p][static_cast<size_t>(rng.Below(neighbors[p].size()))];
    const double u = rng.Uniform01();
    out.Synthesize(d, members[p], members[q], u, label);
  }
}

size_t MajorityCount(const Groups& groups) {
  size_t best = 0;
  for (const auto& [cls, members] : groups) best = std::max(best, members.size());
  return best;
}

// Mode of neighbor labels; ties resolved to the lowest class code.
int Vote(const std::vector<int>& labels) {
  std::map<int, size_t> counts;
  for (int l : labels) ++counts[l];
  int best = labels.empty() ? -1 : labels.front();
  size_t best_count = 0;
  for (const auto& [cls, c] : counts) {
    if (c > best_count) {
      best = cls;
      best_count = c;
    }
  }
  return best;
}

std::set<int> MinorityClasses(const Dataset& d) {
  const auto groups = GroupRows(d);
  size_t smallest = std::numeric_limits<size_t>::max();
  for (const auto& [cls, members] : groups) smallest = std::min(smallest, members.size());
  std::set<int> out;
  for (const auto& [cls, members] : groups) {
    if (members.size() == smallest) out.insert(cls);
  }
  return out;
}

Dataset KeepRows(const Dataset& d, const std::vector<bool>& keep, SamplerTrace* trace) {
  Builder b(d.cols());
  for (size_t i = 0; i < d.rows(); ++i) {
    if (keep[i]) b.Copy(d, i);
  }
  return b.Finish(d, trace);
}

}  // namespace

std::set<int> EditableClasses(const Dataset& d) {
  const auto groups = GroupRows(d);
  size_t smallest = std::numeric_limits<size_t>::max();
  for (const auto& [cls, members] : groups) smallest = std::min(smallest, members.size());
  std::set<int> out;
  for (const auto& [cls, members] : groups) {
    if (members.size() > smallest) out.insert(cls);
  }
  return out;
}

Dataset Smote(const Dataset& d, int k, Rng& rng, SamplerTrace* trace, const CancelToken& cancel) {
  if (k < 1) Fail(ErrorCode::kInvalidArgument, "k_neighbours must be >= 1");
  const auto groups = GroupRows(d);
  const size_t target = MajorityCount(groups);
  Builder out = CopyAll(d);
  for (const auto& [cls, members] : groups) {
    SmoteClass(d, members, cls, k, target - members.size(), rng, out, cancel);
  }
  return out.Finish(d, trace);
}

Dataset BorderlineSmote(const Dataset& d, int k, int m, BorderlineKind kind, Rng& rng,
                        SamplerTrace* trace, const CancelToken& cancel) {
  if (k < 1 || m < 1) Fail(ErrorCode::kInvalidArgument, "neighbor counts must be >= 1");
  const auto groups = GroupRows(d);
  const size_t target = MajorityCount(groups);
  const NeighborIndex all(d.features);
  const size_t m_eff = std::min<size_t>(static_cast<size_t>(m), d.rows() - 1);
  Builder out = CopyAll(d);
  for (const auto& [cls, members] : groups) {
    const size_t needed = target - members.size();
    if (needed == 0) continue;
    RequireOversamplable(members, cls);

    // DANGER: at least half, but not all, of the m neighbors are foreign.
    std::vector<size_t> danger;  // positions into members
    for (size_t p = 0; p < members.size(); ++p) {
      cancel.Check();
      size_t foreign = 0;
      for (const auto& nb : all.Query(d.features.row(members[p]), m_eff, members[p])) {
        foreign += d.labels[nb.index] != cls;
      }
      if (2 * foreign >= m_eff && foreign < m_eff) danger.push_back(p);
    }
    if (danger.empty()) {
      Note(trace, "borderline_smote: empty DANGER set for class " + std::to_string(cls) +
                      "; fell back to smote");
      SmoteClass(d, members, cls, k, needed, rng, out, cancel);
      continue;
    }

    if (kind == BorderlineKind::kBorderline1) {
      const size_t k_eff = std::min<size_t>(static_cast<size_t>(k), members.size() - 1);
      const auto neighbors = ClassNeighbors(d, members, k_eff, cancel);
      for (size_t s = 0; s < needed; ++s) {
        if (s % 256 == 0) cancel.Check();
        const size_t p = danger[static_cast<size_t>(rng.Below(danger.size()))];
        const size_t q = neighbors[p][static_cast<size_t>(rng.Below(neighbors[p].size()))];
        out.Synthesize(d, members[p], members[q], rng.Uniform01(), cls);
      }
    } else {
      // Borderline-2: neighbors drawn from every class; foreign neighbors are
      // approached at most half way.
      const size_t k_eff = std::min<size_t>(static_cast<size_t>(k), d.rows() - 1);
      std::map<size_t, std::vector<size_t>> neighbors;
      for (size_t p : danger) {
        cancel.Check();
        for (const auto& nb : all.Query(d.features.row(members[p]), k_eff, members[p])) {
          neighbors[p].push_back(nb.index);
        }
      }
      for (size_t s = 0; s < needed; ++s) {
        if (s % 256 == 0) cancel.Check();
        const size_t p = danger[static_cast<size_t>(rng.Below(danger.size()))];
        const auto& nbs = neighbors[p];
        const size_t z = nbs[static_cast<size_t>(rng.Below(nbs.size()))];
        const double u = d.labels[z] == cls ? rng.Uniform01() : 0.5 * rng.Uniform01();
        out.Synthesize(d, members[p], z, u, cls);
      }
    }
  }
  return out.Finish(d, trace);
}

Dataset Adasyn(const Dataset& d, int k, Rng& rng, SamplerTrace* trace, const CancelToken& cancel) {
  if (k < 1) Fail(ErrorCode::kInvalidArgument, "k_neighbours must be >= 1");
  const auto groups = GroupRows(d);
  const size_t target = MajorityCount(groups);
  const NeighborIndex all(d.features);
  const size_t k_all = std::min<size_t>(static_cast<size_t>(k), d.rows() - 1);
  Builder out = CopyAll(d);
  for (const auto& [cls, members] : groups) {
    const size_t needed = target - members.size();
    if (needed == 0) continue;
    RequireOversamplable(members, cls);

    std::vector<double> ratio(members.size(), 0.0);
    double total = 0.0;
    for (size_t p = 0; p < members.size(); ++p) {
      cancel.Check();
      size_t foreign = 0;
      for (const auto& nb : all.Query(d.features.row(members[p]), k_all, members[p])) {
        foreign += d.labels[nb.index] != cls;
      }
      ratio[p] = static_cast<double>(foreign) / static_cast<double>(k_all);
      total += ratio[p];
    }
    if (total == 0.0) {
      Note(trace, "adasyn: no class " + std::to_string(cls) +
                      " sample has foreign neighbors; fell back to smote");
      SmoteClass(d, members, cls, k, needed, rng, out, cancel);
      continue;
    }

    // Largest-remainder apportionment of `needed` by normalized ratio.
    std::vector<size_t> quota(members.size());
    std::vector<std::pair<double, size_t>> remainders;
    size_t assigned = 0;
    for (size_t p = 0; p < members.size(); ++p) {
      const double exact = ratio[p] / total * static_cast<double>(needed);
      quota[p] = static_cast<size_t>(std::floor(exact));
      assigned += quota[p];
      remainders.emplace_back(exact - std::floor(exact), p);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (size_t i = 0; assigned < needed; ++i, ++assigned) ++quota[remainders[i % remainders.size()].second];

    const size_t k_eff = std::min<size_t>(static_cast<size_t>(k), members.size() - 1);
    const auto neighbors = ClassNeighbors(d, members, k_eff, cancel);
    for (size_t p = 0; p < members.size(); ++p) {
      cancel.Check();
      for (size_t s = 0; s < quota[p]; ++s) {
        const size_t q = neighbors[p][static_cast<size_t>(rng.Below(neighbors[p].size()))];
        out.Synthesize(d, members[p], members[q], rng.Uniform01(), cls);
      }
    }
  }
  return out.Finish(d, trace);
}

namespace {

// One ENN pass: keep[i] false for editable rows whose neighbor vote differs.
std::vector<bool> EnnKeep(const Dataset& d, size_t k, const std::set<int>& editable,
                          const CancelToken& cancel) {
  std::vector<bool> keep(d.rows(), true);
  if (d.rows() < 2) return keep;
  const NeighborIndex index(d.features);
  const size_t k_eff = std::min(k, d.rows() - 1);
  std::vector<int> votes;
  for (size_t i = 0; i < d.rows(); ++i) {
    if (!editable.contains(d.labels[i])) continue;
    if (i % 64 == 0) cancel.Check();
    votes.clear();
    for (const auto& nb : index.Query(d.features.row(i), k_eff, i)) votes.push_back(d.labels[nb.index]);
    if (Vote(votes) != d.labels[i]) keep[i] = false;
  }
  return keep;
}

}  // namespace

Dataset EditedNearestNeighbours(const Dataset& d, int k, const std::optional<std::set<int>>& editable,
                                SamplerTrace* trace, const CancelToken& cancel) {
  if (k < 1) Fail(ErrorCode::kInvalidArgument, "k_neighbours must be >= 1");
  const auto classes = editable ? *editable : EditableClasses(d);
  return KeepRows(d, EnnKeep(d, static_cast<size_t>(k), classes, cancel), trace);
}

Dataset AllKnn(const Dataset& d, int k_max, SamplerTrace* trace, const CancelToken& cancel) {
  if (k_max < 1) Fail(ErrorCode::kInvalidArgument, "k_neighbours must be >= 1");
  const auto editable = EditableClasses(d);
  const auto present = GroupRows(d);
  Dataset current = d;
  SamplerTrace current_trace;
  current_trace.origin.resize(d.rows());
  for (size_t i = 0; i < d.rows(); ++i) current_trace.origin[i] = i;

  for (int k = 1; k <= k_max; ++k) {
    const auto keep = EnnKeep(current, static_cast<size_t>(k), editable, cancel);
    std::map<int, size_t> remaining;
    for (size_t i = 0; i < current.rows(); ++i) {
      if (keep[i]) ++remaining[current.labels[i]];
    }
    bool empties_class = false;
    for (const auto& [cls, members] : present) empties_class |= remaining[cls] == 0;
    if (empties_class) {
      Note(trace, "all_knn: stopped before k=" + std::to_string(k) + " (a class would be emptied)");
      break;
    }
    SamplerTrace step;
    Dataset next = KeepRows(current, keep, &step);
    SamplerTrace composed;
    Compose(&composed, current_trace, std::move(step));
    current_trace = std::move(composed);
    current = std::move(next);
  }
  if (trace) {
    trace->origin = std::move(current_trace.origin);
  }
  return current;
}

Dataset CondensedNearestNeighbour(const Dataset& d, int k, Rng& rng, SamplerTrace* trace,
                                  const CancelToken& cancel) {
  if (k < 1) Fail(ErrorCode::kInvalidArgument, "k_neighbours must be >= 1");
  const auto groups = GroupRows(d);
  const auto editable = EditableClasses(d);
  std::vector<bool> keep(d.rows(), true);
  std::vector<size_t> fixed;  // rows of non-editable classes
  for (const auto& [cls, members] : groups) {
    if (!editable.contains(cls)) fixed.insert(fixed.end(), members.begin(), members.end());
  }
  std::sort(fixed.begin(), fixed.end());

  // Per editable class (ascending code): the store starts as the fixed rows
  // plus members[rng.Below(size)]; the other members, ascending, are shuffled
  // once and scanned in passes until a pass adds nothing.
  for (const auto& [cls, members] : groups) {
    if (!editable.contains(cls)) continue;
    std::vector<size_t> store = fixed;
    const size_t seed_pos = static_cast<size_t>(rng.Below(members.size()));
    store.push_back(members[seed_pos]);
    std::vector<size_t> candidates;
    for (size_t p = 0; p < members.size(); ++p) {
      if (p != seed_pos) candidates.push_back(members[p]);
    }
    rng.Shuffle(candidates);
    std::vector<bool> added(candidates.size(), false);
    std::vector<int> votes;
    bool changed = true;
    while (changed) {
      changed = false;
      for (size_t c = 0; c < candidates.size(); ++c) {
        if (added[c]) continue;
        if (c % 32 == 0) cancel.Check();
        const NeighborIndex index(d.features, store);
        votes.clear();
        for (const auto& nb : index.Query(d.features.row(candidates[c]), static_cast<size_t>(k))) {
          votes.push_back(d.labels[index.row(nb.index)]);
        }
        if (Vote(votes) != cls) {
          store.push_back(candidates[c]);
          added[c] = true;
          changed = true;
        }
      }
    }
    for (size_t i : members) keep[i] = false;
    keep[members[seed_pos]] = true;
    for (size_t c = 0; c < candidates.size(); ++c) {
      if (added[c]) keep[candidates[c]] = true;
    }
  }
  return KeepRows(d, keep, trace);
}

Matrix KMeans(const Matrix& points, size_t k, Rng& rng, int restarts, int max_iter,
              const CancelToken& cancel) {
  const size_t n = points.rows();
  const size_t dim = points.cols();
  if (k == 0 || n == 0) Fail(ErrorCode::kInvalidArgument, "k-means needs k >= 1 and points");
  k = std::min(k, n);

  auto sq_dist = [&](std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (size_t j = 0; j < dim; ++j) acc += (a[j] - b[j]) * (a[j] - b[j]);
    return acc;
  };

  Matrix best;
  double best_inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, restarts); ++r) {
    // Initialization: distinct points in random order; pad with duplicates of
    // chosen centroids when fewer than k distinct points exist.
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    rng.Shuffle(order);
    Matrix centers(0, dim);
    for (size_t idx : order) {
      if (centers.rows() == k) break;
      bool duplicate = false;
      for (size_t c = 0; c < centers.rows() && !duplicate; ++c) {
        duplicate = sq_dist(centers.row(c), points.row(idx)) == 0.0;
      }
      if (!duplicate) centers.AppendRow(points.row(idx));
    }
    for (size_t c = 0; centers.rows() < k; ++c) {
      std::vector<double> copy(centers.row(c % centers.rows()).begin(),
                               centers.row(c % centers.rows()).end());
      centers.AppendRow(copy);
    }

    std::vector<size_t> assign(n, k);
    for (int iter = 0; iter < max_iter; ++iter) {
      cancel.Check();
      bool moved = false;
      for (size_t i = 0; i < n; ++i) {
        size_t arg = 0;
        double dist = std::numeric_limits<double>::infinity();
        for (size_t c = 0; c < k; ++c) {
          const double dd = sq_dist(points.row(i), centers.row(c));
          if (dd < dist) {
            dist = dd;
            arg = c;
          }
        }
        moved |= assign[i] != arg;
        assign[i] = arg;
      }
      if (!moved) break;
      Matrix sums(k, dim, 0.0);
      std::vector<size_t> counts(k, 0);
      for (size_t i = 0; i < n; ++i) {
        ++counts[assign[i]];
        for (size_t j = 0; j < dim; ++j) sums(assign[i], j) += points(i, j);
      }
      for (size_t c = 0; c < k; ++c) {
        if (counts[c] == 0) continue;  // empty cluster keeps its center
        for (size_t j = 0; j < dim; ++j) centers(c, j) = sums(c, j) / static_cast<double>(counts[c]);
      }
    }
    double inertia = 0.0;
    for (size_t i = 0; i < n; ++i) inertia += sq_dist(points.row(i), centers.row(assign[i]));
    if (inertia < best_inertia) {
      best_inertia = inertia;
      best = std::move(centers);
    }
  }
  return best;
}

Dataset ClusterCentroids(const Dataset& d, Voting voting, Rng& rng, SamplerTrace* trace,
                         const CancelToken& cancel) {
  const auto groups = GroupRows(d);
  const auto editable = EditableClasses(d);
  size_t target = std::numeric_limits<size_t>::max();
  for (const auto& [cls, members] : groups) target = std::min(target, members.size());

  Builder out(d.cols());
  std::vector<bool> keep(d.rows(), true);
  for (int cls : editable) {
    for (size_t i : groups.at(cls)) keep[i] = false;
  }
  for (size_t i = 0; i < d.rows(); ++i) {
    if (keep[i]) out.Copy(d, i);
  }
  for (int cls : editable) {
    const auto& members = groups.at(cls);
    const Matrix points = d.features.SelectRows(members);
    const Matrix centers = KMeans(points, target, rng, 10, 300, cancel);
    if (voting == Voting::kHard) {
      const NeighborIndex index(points);
      // Each centroid takes its nearest sample not already taken, so the
      // output stays a multiset subset of the input.
      std::vector<bool> taken(members.size(), false);
      std::vector<size_t> picks;
      for (size_t c = 0; c < centers.rows(); ++c) {
        auto near = index.Query(centers.row(c), 1);
        if (taken[near.front().index]) near = index.Query(centers.row(c), members.size());
        for (const auto& n : near) {
          if (taken[n.index]) continue;
          taken[n.index] = true;
          picks.push_back(members[n.index]);
          break;
        }
      }
      std::sort(picks.begin(), picks.end());
      for (size_t row : picks) out.Copy(d, row);
    } else {
      for (size_t c = 0; c < centers.rows(); ++c) out.AppendRaw(centers.row(c), cls);
    }
  }
  return out.Finish(d, trace);
}

Dataset TomekLinks(const Dataset& d, const std::optional<std::set<int>>& editable,
                   SamplerTrace* trace, const CancelToken& cancel) {
  const auto classes = editable ? *editable : EditableClasses(d);
  std::vector<bool> keep(d.rows(), true);
  if (d.rows() < 2) return KeepRows(d, keep, trace);
  const NeighborIndex index(d.features);
  std::vector<size_t> nearest(d.rows());
  for (size_t i = 0; i < d.rows(); ++i) {
    if (i % 64 == 0) cancel.Check();
    nearest[i] = index.Query(d.features.row(i), 1, i).front().index;
  }
  for (size_t a = 0; a < d.rows(); ++a) {
    const size_t b = nearest[a];
    if (d.labels[a] != d.labels[b] && nearest[b] == a && classes.contains(d.labels[a])) {
      keep[a] = false;
    }
  }
  return KeepRows(d, keep, trace);
}

Dataset SmoteEnn(const Dataset& d, SmoteEnnStrategy strategy, int k_smote, int k_enn, Rng& rng,
                 SamplerTrace* trace, const CancelToken& cancel) {
  std::set<int> editable;
  const auto minority = MinorityClasses(d);
  for (const auto& [cls, members] : GroupRows(d)) {
    const bool is_minority = minority.contains(cls);
    if (strategy == SmoteEnnStrategy::kAll ||
        (strategy == SmoteEnnStrategy::kAuto && !is_minority) ||
        (strategy == SmoteEnnStrategy::kMinority && is_minority)) {
      editable.insert(cls);
    }
  }
  SamplerTrace first, second;
  Dataset oversampled = Smote(d, k_smote, rng, &first, cancel);
  Dataset cleaned = EditedNearestNeighbours(oversampled, k_enn, editable, &second, cancel);
  Compose(trace, first, std::move(second));
  return cleaned;
}

Dataset SmoteTomek(const Dataset& d, int k_smote, Rng& rng, SamplerTrace* trace,
                   const CancelToken& cancel) {
  const auto editable = EditableClasses(d);
  SamplerTrace first, second;
  Dataset oversampled = Smote(d, k_smote, rng, &first, cancel);
  Dataset cleaned = TomekLinks(oversampled, editable, &second, cancel);
  Compose(trace, first, std::move(second));
  return cleaned;
}

Dataset ApplySampler(const SamplerSpec& spec, const Dataset& d, Rng& rng, SamplerTrace* trace,
                     const CancelToken& cancel) {
  spec.Validate();
  const auto dist = ComputeClassDistribution(d);
  if (dist.counts.size() < 2) Fail(ErrorCode::kInvalidArgument, "resampling needs at least two classes");
  if (dist.minority_size < 2) {
    Fail(ErrorCode::kInvalidArgument, "minority class has fewer than 2 samples");
  }
  switch (spec.kind) {
    case SamplerKind::kSmote: return Smote(d, spec.k_neighbours, rng, trace, cancel);
    case SamplerKind::kBorderlineSmote:
      return BorderlineSmote(d, spec.k_neighbours, spec.m_neighbours, spec.borderline, rng, trace,
                             cancel);
    case SamplerKind::kAdasyn: return Adasyn(d, spec.k_neighbours, rng, trace, cancel);
    case SamplerKind::kEditedNearestNeighbours:
      return EditedNearestNeighbours(d, spec.k_neighbours, std::nullopt, trace, cancel);
    case SamplerKind::kCondensedNearestNeighbour:
      return CondensedNearestNeighbour(d, spec.k_neighbours, rng, trace, cancel);
    case SamplerKind::kAllKnn: return AllKnn(d, spec.k_neighbours, trace, cancel);
    case SamplerKind::kClusterCentroids: return ClusterCentroids(d, spec.voting, rng, trace, cancel);
    case SamplerKind::kTomekLinks: return TomekLinks(d, std::nullopt, trace, cancel);
    case SamplerKind::kSmoteEnn:
      return SmoteEnn(d, spec.strategy, spec.k_neighbours, spec.enn_k_neighbours, rng, trace, cancel);
    case SamplerKind::kSmoteTomek: return SmoteTomek(d, spec.k_neighbours, rng, trace, cancel);
  }
  Fail(ErrorCode::kInvalidArgument, "unknown sampler kind");
}

}  // namespace imbal
