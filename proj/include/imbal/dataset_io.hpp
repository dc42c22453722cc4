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

#ifndef IMBAL_DATASET_IO_HPP_
#define IMBAL_DATASET_IO_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "imbal/dataset.hpp"

namespace imbal {

struct CsvOptions {
  char delimiter = ',';
  bool has_header = true;
  // Column holding the class label: a header name, or a zero-based index
  // written as digits. Empty selects the last column.
  std::string label_column;
};

// Ingestion contract shared by CSV and ARFF:
//   numeric cells that are empty, "?", "NA" or "NaN" are imputed with the
//   column median; categorical columns are integer-coded (CSV: first
//   appearance, ARFF: declared domain order) and missing cells become a
//   dedicated "<missing>" category; labels are coded by first appearance.
Dataset ParseCsv(std::string_view text, const CsvOptions& options, std::string name = "csv");
Dataset LoadCsv(const std::filesystem::path& path, const CsvOptions& options = {});

// target: class attribute name; default is the last nominal attribute.
Dataset ParseArff(std::string_view text, const std::optional<std::string>& target = std::nullopt,
                  std::string name = "arff");
Dataset LoadArff(const std::filesystem::path& path,
                 const std::optional<std::string>& target = std::nullopt);

// Loads by extension: .arff through LoadArff, anything else as a
// comma-separated CSV with a header and the label in the last column.
Dataset LoadDataset(const std::filesystem::path& path);

// Writes features plus a trailing "class" column. Categorical feature cells
// are written as their category names.
void SaveCsv(const Dataset& d, const std::filesystem::path& path);

struct OpenMlOptions {
  std::string base_url = "https://www.openml.org";
  int timeout_seconds = 60;
};

// Reads IMBAL_OPENML_URL, falling back to the public server.
OpenMlOptions OpenMlOptionsFromEnv();

// Default cache directory: $IMBAL_OPENML_CACHE or ~/.cache/imbal/openml.
std::filesystem::path DefaultOpenMlCacheDir();

// Downloads (or reads from cache) the ARFF for an OpenML dataset id.
// Cache layout: <cache_dir>/<id>/description.json and dataset.arff. A warm
// cache performs no network access.
Dataset FetchOpenMl(int dataset_id, const std::filesystem::path& cache_dir,
                    const OpenMlOptions& options = OpenMlOptionsFromEnv());

// Looks up the id of the active dataset with the given name.
int ResolveOpenMlName(const std::string& name, const OpenMlOptions& options = OpenMlOptionsFromEnv());

// "openml:<id>" or "openml:<name>" fetches through the cache; anything else
// is a file path, resolved against `base_dir` when relative.
Dataset LoadDatasetSource(const std::string& source, const std::filesystem::path& base_dir = {},
                          const std::filesystem::path& cache_dir = DefaultOpenMlCacheDir(),
                          const OpenMlOptions& options = OpenMlOptionsFromEnv());

}  // namespace imbal

#endif  // IMBAL_DATASET_IO_HPP_
