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

// OpenML dataset download client (REST description endpoint + ARFF file).

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "imbal/dataset_io.hpp"
#include "imbal/error.hpp"

namespace imbal {
namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl Split(const std::string& url) {
  const size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) Fail(ErrorCode::kInvalidArgument, "malformed URL: " + url);
  const size_t path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::string Get(const std::string& url, const OpenMlOptions& options) {
  const auto [origin, path] = Split(url);
  httplib::Client client(origin);
  client.set_follow_location(true);
  client.set_connection_timeout(options.timeout_seconds, 0);
  client.set_read_timeout(options.timeout_seconds, 0);
  auto response = client.Get(path);
  if (!response) {
    Fail(ErrorCode::kNetwork, "HTTP request to " + url + " failed: " + httplib::to_string(response.error()));
  }
  if (response->status != 200) {
    Fail(ErrorCode::kNetwork, "HTTP " + std::to_string(response->status) + " from " + url);
  }
  return response->body;
}

std::string BaseUrl(const OpenMlOptions& options) {
  std::string base = options.base_url;
  while (!base.empty() && base.back() == '/') base.pop_back();
  return base;
}

void WriteAtomically(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) Fail(ErrorCode::kIo, "cache write failure: " + tmp.string());
    out << content;
    if (!out) Fail(ErrorCode::kIo, "cache write failure: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) Fail(ErrorCode::kIo, "cache write failure: " + ec.message());
}

std::string ReadAll(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

OpenMlOptions OpenMlOptionsFromEnv() {
  OpenMlOptions options;
  if (const char* url = std::getenv("IMBAL_OPENML_URL"); url && *url) options.base_url = url;
  return options;
}

std::filesystem::path DefaultOpenMlCacheDir() {
  if (const char* dir = std::getenv("IMBAL_OPENML_CACHE"); dir && *dir) return dir;
  if (const char* home = std::getenv("HOME"); home && *home) {
    return std::filesystem::path(home) / ".cache" / "imbal" / "openml";
  }
  return std::filesystem::temp_directory_path() / "imbal-openml";
}

Dataset FetchOpenMl(int dataset_id, const std::filesystem::path& cache_dir,
                    const OpenMlOptions& options) {
  if (dataset_id <= 0) Fail(ErrorCode::kInvalidArgument, "OpenML dataset id must be positive");
  const auto dir = cache_dir / std::to_string(dataset_id);
  const auto description_path = dir / "description.json";
  const auto arff_path = dir / "dataset.arff";

  if (!std::filesystem::exists(description_path) || !std::filesystem::exists(arff_path)) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) Fail(ErrorCode::kIo, "cache write failure: " + ec.message());
    const std::string description =
        Get(BaseUrl(options) + "/api/v1/json/data/" + std::to_string(dataset_id), options);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(description);
    } catch (const nlohmann::json::exception& e) {
      Fail(ErrorCode::kParse, std::string("malformed OpenML description: ") + e.what());
    }
    const auto& desc = doc.at("data_set_description");
    const std::string url = desc.at("url").get<std::string>();
    const std::string arff = Get(url, options);
    WriteAtomically(arff_path, arff);
    WriteAtomically(description_path, description);
  }

  const auto doc = nlohmann::json::parse(ReadAll(description_path));
  const auto& desc = doc.at("data_set_description");
  std::optional<std::string> target;
  if (desc.contains("default_target_attribute")) {
    target = desc["default_target_attribute"].get<std::string>();
  }
  Dataset d = LoadArff(arff_path, target);
  if (desc.contains("name")) d.name = desc["name"].get<std::string>();
  return d;
}

int ResolveOpenMlName(const std::string& name, const OpenMlOptions& options) {
  const std::string body = Get(
      BaseUrl(options) + "/api/v1/json/data/list/data_name/" + name + "/status/active/limit/1",
      options);
  const auto doc = nlohmann::json::parse(body);
  const auto& list = doc.at("data").at("dataset");
  if (list.empty()) Fail(ErrorCode::kInvalidArgument, "no OpenML dataset named " + name);
  const auto& did = list.at(0).at("did");
  return did.is_string() ? std::stoi(did.get<std::string>()) : did.get<int>();
}

Dataset LoadDatasetSource(const std::string& source, const std::filesystem::path& base_dir,
                          const std::filesystem::path& cache_dir, const OpenMlOptions& options) {
  constexpr std::string_view kPrefix = "openml:";
  if (source.starts_with(kPrefix)) {
    const std::string ref = source.substr(kPrefix.size());
    if (ref.empty()) Fail(ErrorCode::kInvalidArgument, "empty OpenML reference");
    const bool numeric = std::all_of(ref.begin(), ref.end(), [](char c) { return c >= '0' && c <= '9'; });
    const int id = numeric ? std::stoi(ref) : ResolveOpenMlName(ref, options);
    return FetchOpenMl(id, cache_dir, options);
  }
  std::filesystem::path path(source);
  if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
  return LoadDataset(path);
}

}  // namespace imbal
