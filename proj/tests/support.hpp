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

#ifndef IMBAL_TESTS_SUPPORT_HPP_
#define IMBAL_TESTS_SUPPORT_HPP_

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "imbal/dataset.hpp"
#include "imbal/error.hpp"
#include "imbal/rng.hpp"

namespace imbal::testing {

// Class c has counts[c] rows drawn from N(c * shift, 1) in the first
// `informative` columns and N(0, 1) elsewhere. Rows are grouped by class.
inline Dataset Gaussians(const std::vector<size_t>& counts, size_t d, double shift, uint64_t seed,
                         size_t informative = 2) {
  Rng rng(seed);
  Dataset out;
  out.name = "gaussians";
  std::vector<double> row(d);
  for (size_t c = 0; c < counts.size(); ++c) {
    out.label_names.push_back("c" + std::to_string(c));
    for (size_t i = 0; i < counts[c]; ++i) {
      for (size_t j = 0; j < d; ++j) row[j] = rng.Normal() + (j < informative ? shift * static_cast<double>(c) : 0.0);
      out.features.AppendRow(row);
      out.labels.push_back(static_cast<int>(c));
    }
  }
  if (out.features.cols() == 0) out.features = Matrix(0, d);
  out.columns = NumericColumns(d);
  out.Validate();
  return out;
}

inline Dataset FromRows(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels) {
  Dataset out;
  out.name = "fixture";
  for (const auto& r : rows) out.features.AppendRow(r);
  out.labels = labels;
  int max_label = 0;
  for (int l : labels) max_label = std::max(max_label, l);
  for (int c = 0; c <= max_label; ++c) out.label_names.push_back("c" + std::to_string(c));
  out.columns = NumericColumns(out.features.cols());
  out.Validate();
  return out;
}

template <typename F>
ErrorCode CodeOf(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an imbal::Error");
  return ErrorCode::kRuntime;
}

inline std::filesystem::path TempDir(const std::string& name) {
  const auto dir = std::filesystem::path(IMBAL_TEST_TMP) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string ReadText(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

}  // namespace imbal::testing

#endif  // IMBAL_TESTS_SUPPORT_HPP_
