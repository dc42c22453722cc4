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

#include <doctest.h>

#include "imbal/error.hpp"
#include "imbal/metrics.hpp"
#include "imbal/rng.hpp"
#include "metric_oracle.hpp"

using namespace imbal;

TEST_CASE("confusion: counts") {
  const auto cm = Confusion(std::vector<int>{0, 0, 1, 1}, std::vector<int>{0, 1, 1, 1});
  CHECK(cm.classes == std::vector<int>{0, 1});
  CHECK(cm.counts == std::vector<std::vector<size_t>>{{1, 1}, {0, 2}});

  const auto diag = Confusion(std::vector<int>{2, 0, 1}, std::vector<int>{2, 0, 1});
  for (size_t i = 0; i < 3; ++i) {
    for (size_t j = 0; j < 3; ++j) CHECK(diag.counts[i][j] == (i == j ? 1u : 0u));
  }

  const auto disjoint = Confusion(std::vector<int>{0, 0}, std::vector<int>{1, 1});
  CHECK(disjoint.counts[0][0] == 0);
  CHECK(disjoint.counts[0][1] == 2);

  CHECK_THROWS_AS(Confusion(std::vector<int>{0}, std::vector<int>{0, 1}), Error);
}

TEST_CASE("balanced accuracy") {
  CHECK(BalancedAccuracy(Confusion(std::vector<int>{0, 1, 1}, std::vector<int>{0, 1, 1})) == 1.0);
  // Recall 4/5 on class 0 and 3/5 on class 1.
  std::vector<int> t = {0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
  std::vector<int> p = {0, 0, 0, 0, 1, 1, 1, 1, 0, 0};
  CHECK(BalancedAccuracy(Confusion(t, p)) == doctest::Approx(0.7).epsilon(1e-15));

  std::vector<int> y(100, 0);
  for (size_t i = 90; i < 100; ++i) y[i] = 1;
  CHECK(BalancedAccuracy(Confusion(y, std::vector<int>(100, 0))) == 0.5);
}

TEST_CASE("g-mean") {
  // Recalls 0.9 and 0.4.
  std::vector<int> t(20, 0), p(20, 0);
  for (size_t i = 10; i < 20; ++i) t[i] = 1;
  p[9] = 1;
  for (size_t i = 10; i < 14; ++i) p[i] = 1;
  CHECK(GMean(Confusion(t, p)) == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(GMean(Confusion(t, std::vector<int>(20, 0))) == 0.0);
}

TEST_CASE("macro F1") {
  const auto cm = Confusion(std::vector<int>{0, 0, 1, 1}, std::vector<int>{0, 1, 1, 1});
  CHECK(F1Macro(cm) == doctest::Approx(11.0 / 15.0).epsilon(1e-15));
  // Class 1 never predicted contributes 0.
  CHECK(F1Macro(Confusion(std::vector<int>{0, 1}, std::vector<int>{0, 0})) ==
        doctest::Approx((2.0 * 0.5 / 1.5) / 2.0));
}

TEST_CASE("sensitivity") {
  std::vector<int> t = {0, 0, 0, 1, 1, 1, 1, 1};
  std::vector<int> p = {0, 0, 0, 1, 1, 1, 0, 0};
  CHECK(Sensitivity(Confusion(t, p), 1) == doctest::Approx(0.6));
  CHECK(Sensitivity(Confusion(t, t), 1) == 1.0);
  CHECK_THROWS_AS(Sensitivity(Confusion(std::vector<int>{0, 0}, std::vector<int>{0, 1}), 1), Error);
}

TEST_CASE("metric names round trip") {
  for (auto m : {MetricId::kBalancedAccuracy, MetricId::kGMean, MetricId::kF1Macro, MetricId::kSensitivity}) {
    CHECK(ParseMetric(MetricName(m)) == m);
  }
  CHECK_THROWS_AS(ParseMetric("accuracy"), Error);
}

TEST_CASE("metrics: brute-force oracle, permutation invariance, AM-GM") {
  Rng rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    const int classes = 2 + static_cast<int>(rng.Below(5));
    const size_t n = 1 + static_cast<size_t>(rng.Below(50));
    std::vector<int> t(n), p(n);
    for (size_t i = 0; i < n; ++i) {
      t[i] = static_cast<int>(rng.Below(static_cast<uint64_t>(classes)));
      p[i] = static_cast<int>(rng.Below(static_cast<uint64_t>(classes)));
    }
    const auto cm = Confusion(t, p);
    CHECK(std::abs(BalancedAccuracy(cm) - oracle::BalancedAccuracy(t, p)) <= 1e-12);
    CHECK(std::abs(GMean(cm) - oracle::GMean(t, p)) <= 1e-12);
    CHECK(std::abs(F1Macro(cm) - oracle::F1Macro(t, p)) <= 1e-12);
    CHECK(std::abs(Sensitivity(cm, t[0]) - oracle::Recall(t, p, t[0])) <= 1e-12);
    CHECK(GMean(cm) <= BalancedAccuracy(cm) + 1e-12);

    std::vector<int> perm(static_cast<size_t>(classes));
    for (int c = 0; c < classes; ++c) perm[static_cast<size_t>(c)] = c;
    rng.Shuffle(perm);
    std::vector<int> tp(n), pp(n);
    for (size_t i = 0; i < n; ++i) {
      tp[i] = perm[static_cast<size_t>(t[i])];
      pp[i] = perm[static_cast<size_t>(p[i])];
    }
    const auto cm2 = Confusion(tp, pp);
    CHECK(BalancedAccuracy(cm2) == doctest::Approx(BalancedAccuracy(cm)).epsilon(1e-14));
    CHECK(GMean(cm2) == doctest::Approx(GMean(cm)).epsilon(1e-14));
    CHECK(F1Macro(cm2) == doctest::Approx(F1Macro(cm)).epsilon(1e-14));
  }
}

TEST_CASE("balanced accuracy equals accuracy on uniform classes") {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int classes = 2 + static_cast<int>(rng.Below(4));
    const size_t per = 1 + static_cast<size_t>(rng.Below(10));
    std::vector<int> t, p;
    for (int c = 0; c < classes; ++c) {
      for (size_t i = 0; i < per; ++i) {
        t.push_back(c);
        p.push_back(static_cast<int>(rng.Below(static_cast<uint64_t>(classes))));
      }
    }
    double hits = 0;
    for (size_t i = 0; i < t.size(); ++i) hits += t[i] == p[i] ? 1 : 0;
    CHECK(BalancedAccuracy(Confusion(t, p)) == doctest::Approx(hits / static_cast<double>(t.size())).epsilon(1e-14));
  }
}
