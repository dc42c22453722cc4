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

#include "imbal/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "imbal/error.hpp"

namespace imbal {
namespace {

constexpr const char* kMissingCategory = "<missing>";

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool IsMissingToken(std::string_view s) {
  return s.empty() || s == "?" || s == "NA" || s == "NaN" || s == "nan";
}

std::optional<double> ParseNumber(std::string_view s) {
  s = Trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || std::isnan(value)) return std::nullopt;
  return value;
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// One raw column before coding. Cells hold nullopt for missing values.
struct RawColumn {
  std::string name;
  bool numeric = false;
  // Declared nominal domain (ARFF); empty means code by first appearance.
  std::vector<std::string> domain;
  std::vector<std::optional<std::string>> cells;
};

double Median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

Dataset BuildDataset(std::string name, std::vector<RawColumn> columns, size_t label_index) {
  if (label_index >= columns.size()) Fail(ErrorCode::kParse, "label column absent");
  const size_t n = columns[label_index].cells.size();
  if (n == 0) Fail(ErrorCode::kParse, "dataset has zero rows");

  Dataset d;
  d.name = std::move(name);

  // Labels, coded by first appearance.
  std::map<std::string, int> label_codes;
  d.labels.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    const auto& cell = columns[label_index].cells[i];
    if (!cell) Fail(ErrorCode::kParse, "missing class label in row " + std::to_string(i + 1));
    auto [it, inserted] = label_codes.emplace(*cell, static_cast<int>(d.label_names.size()));
    if (inserted) d.label_names.push_back(*cell);
    d.labels.push_back(it->second);
  }

  std::vector<std::vector<double>> coded;
  for (size_t c = 0; c < columns.size(); ++c) {
    if (c == label_index) continue;
    RawColumn& raw = columns[c];
    ColumnMeta meta;
    meta.name = raw.name;
    std::vector<double> values(n, 0.0);
    size_t present = 0;
    for (const auto& cell : raw.cells) present += cell.has_value();
    if (present == 0) Fail(ErrorCode::kParse, "column '" + raw.name + "' has no values");
    meta.missing_count = n - present;

    if (raw.numeric) {
      meta.kind = ColumnKind::kNumeric;
      std::vector<double> observed;
      observed.reserve(present);
      for (size_t i = 0; i < n; ++i) {
        if (!raw.cells[i]) continue;
        auto v = ParseNumber(*raw.cells[i]);
        if (!v) {
          Fail(ErrorCode::kParse, "non-numeric value '" + *raw.cells[i] + "' in numeric column '" +
                                      raw.name + "'");
        }
        values[i] = *v;
        observed.push_back(*v);
      }
      const double median = Median(std::move(observed));
      for (size_t i = 0; i < n; ++i) {
        if (!raw.cells[i]) values[i] = median;
      }
    } else {
      meta.kind = ColumnKind::kCategorical;
      std::map<std::string, int> codes;
      for (const auto& v : raw.domain) {
        codes.emplace(v, static_cast<int>(meta.categories.size()));
        meta.categories.push_back(v);
      }
      const bool declared = !raw.domain.empty();
      int missing_code = -1;
      for (size_t i = 0; i < n; ++i) {
        const auto& cell = raw.cells[i];
        if (!cell) {
          if (missing_code < 0) {
            missing_code = static_cast<int>(meta.categories.size());
            meta.categories.push_back(kMissingCategory);
          }
          values[i] = missing_code;
          continue;
        }
        auto it = codes.find(*cell);
        if (it == codes.end()) {
          if (declared) {
            Fail(ErrorCode::kParse, "value '" + *cell + "' not in declared domain of '" +
                                        raw.name + "'");
          }
          it = codes.emplace(*cell, static_cast<int>(meta.categories.size())).first;
          meta.categories.push_back(*cell);
        }
        values[i] = it->second;
      }
    }
    d.columns.push_back(std::move(meta));
    coded.push_back(std::move(values));
  }

  const size_t dcols = coded.size();
  d.features = Matrix(n, dcols);
  for (size_t j = 0; j < dcols; ++j) {
    for (size_t i = 0; i < n; ++i) d.features(i, j) = coded[j][i];
  }
  d.Validate();
  return d;
}

// RFC-4180 style record splitter: quoted fields, doubled quotes, embedded
// delimiters and newlines.
std::vector<std::vector<std::string>> SplitCsv(std::string_view text, char delim,
                                               std::vector<std::vector<bool>>* quoted_out) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::vector<bool>> quoted;
  std::vector<std::string> record;
  std::vector<bool> record_quoted;
  std::string field;
  bool in_quotes = false;
  bool field_quoted = false;
  bool any = false;
  auto end_field = [&] {
    record.push_back(field);
    record_quoted.push_back(field_quoted);
    field.clear();
    field_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    bool blank = record.size() == 1 && Trim(record[0]).empty() && !record_quoted[0];
    if (!blank) {
      records.push_back(std::move(record));
      quoted.push_back(std::move(record_quoted));
    }
    record.clear();
    record_quoted.clear();
  };
  for (size_t i = 0; i < text.size(); ++i) {
    char ch = text[i];
    any = true;
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    if (ch == '"' && Trim(field).empty()) {
      field.clear();
      in_quotes = true;
      field_quoted = true;
    } else if (ch == delim) {
      end_field();
    } else if (ch == '\n') {
      end_record();
      any = false;
    } else if (ch != '\r') {
      field.push_back(ch);
    }
  }
  if (in_quotes) Fail(ErrorCode::kParse, "unterminated quoted field");
  if (any) end_record();
  if (quoted_out) *quoted_out = std::move(quoted);
  return records;
}

bool AllDigits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

Dataset ParseCsv(std::string_view text, const CsvOptions& options, std::string name) {
  std::vector<std::vector<bool>> quoted;
  auto records = SplitCsv(text, options.delimiter, &quoted);
  if (records.empty()) Fail(ErrorCode::kParse, "dataset has zero rows");

  std::vector<std::string> header;
  size_t first = 0;
  const size_t width = records[0].size();
  if (options.has_header) {
    for (const auto& h : records[0]) header.emplace_back(Trim(h));
    first = 1;
  } else {
    for (size_t j = 0; j < width; ++j) header.push_back("col" + std::to_string(j));
  }

  size_t label_index = width - 1;
  if (!options.label_column.empty()) {
    auto it = std::find(header.begin(), header.end(), options.label_column);
    if (it != header.end()) {
      label_index = static_cast<size_t>(it - header.begin());
    } else if (AllDigits(options.label_column)) {
      label_index = std::stoul(options.label_column);
      if (label_index >= width) Fail(ErrorCode::kParse, "label column absent");
    } else {
      Fail(ErrorCode::kParse, "label column absent");
    }
  }

  std::vector<RawColumn> columns(width);
  for (size_t j = 0; j < width; ++j) columns[j].name = header[j];
  for (size_t r = first; r < records.size(); ++r) {
    if (records[r].size() != width) {
      Fail(ErrorCode::kParse, "row " + std::to_string(r + 1) + " has " +
                                  std::to_string(records[r].size()) + " fields, expected " +
                                  std::to_string(width));
    }
    for (size_t j = 0; j < width; ++j) {
      std::string_view cell = quoted[r][j] ? std::string_view(records[r][j]) : Trim(records[r][j]);
      if (!quoted[r][j] && IsMissingToken(cell)) {
        columns[j].cells.emplace_back(std::nullopt);
      } else {
        columns[j].cells.emplace_back(std::string(cell));
      }
    }
  }
  // A column is numeric when every present cell parses as a number.
  for (auto& col : columns) {
    col.numeric = std::all_of(col.cells.begin(), col.cells.end(), [](const auto& cell) {
      return !cell || ParseNumber(*cell).has_value();
    });
  }
  return BuildDataset(std::move(name), std::move(columns), label_index);
}

Dataset LoadCsv(const std::filesystem::path& path, const CsvOptions& options) {
  return ParseCsv(ReadFile(path), options, path.stem().string());
}

namespace {

std::string Lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Reads one ARFF token (possibly quoted) from the front of `s`.
std::string TakeToken(std::string_view& s) {
  s = Trim(s);
  if (s.empty()) return {};
  std::string out;
  if (s.front() == '\'' || s.front() == '"') {
    char q = s.front();
    size_t i = 1;
    for (; i < s.size() && s[i] != q; ++i) {
      if (s[i] == '\\' && i + 1 < s.size()) ++i;
      out.push_back(s[i]);
    }
    if (i >= s.size()) Fail(ErrorCode::kParse, "unterminated quote in ARFF");
    s.remove_prefix(i + 1);
    return out;
  }
  size_t i = 0;
  while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '{') ++i;
  out = std::string(s.substr(0, i));
  s.remove_prefix(i);
  return out;
}

// Splits an ARFF data row or nominal domain on commas, honoring quotes.
std::vector<std::pair<std::string, bool>> SplitArffValues(std::string_view s) {
  std::vector<std::pair<std::string, bool>> out;
  std::string cur;
  bool quoted = false;
  char q = 0;
  bool in_q = false;
  for (size_t i = 0; i < s.size(); ++i) {
    char ch = s[i];
    if (in_q) {
      if (ch == '\\' && i + 1 < s.size()) {
        cur.push_back(s[++i]);
      } else if (ch == q) {
        in_q = false;
      } else {
        cur.push_back(ch);
      }
    } else if ((ch == '\'' || ch == '"') && Trim(cur).empty()) {
      cur.clear();
      in_q = true;
      quoted = true;
      q = ch;
    } else if (ch == ',') {
      out.emplace_back(quoted ? cur : std::string(Trim(cur)), quoted);
      cur.clear();
      quoted = false;
    } else {
      cur.push_back(ch);
    }
  }
  if (in_q) Fail(ErrorCode::kParse, "unterminated quote in ARFF");
  out.emplace_back(quoted ? cur : std::string(Trim(cur)), quoted);
  return out;
}

}  // namespace

Dataset ParseArff(std::string_view text, const std::optional<std::string>& target, std::string name) {
  std::vector<RawColumn> columns;
  bool in_data = false;
  size_t line_no = 0;
  std::string relation = std::move(name);
  while (!text.empty()) {
    size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
    ++line_no;
    line = Trim(line);
    if (line.empty() || line.front() == '%') continue;
    const std::string where = " (line " + std::to_string(line_no) + ")";
    if (!in_data) {
      if (line.front() != '@') Fail(ErrorCode::kParse, "unexpected text in ARFF header" + where);
      std::string_view rest = line;
      std::string keyword = Lower(TakeToken(rest));
      if (keyword == "@relation") {
        relation = TakeToken(rest);
      } else if (keyword == "@attribute") {
        RawColumn col;
        col.name = TakeToken(rest);
        rest = Trim(rest);
        if (col.name.empty() || rest.empty()) {
          Fail(ErrorCode::kParse, "malformed @attribute line" + where);
        }
        if (rest.front() == '{') {
          size_t close = rest.rfind('}');
          if (close == std::string_view::npos) {
            Fail(ErrorCode::kParse, "malformed @attribute line" + where);
          }
          for (auto& [v, q] : SplitArffValues(rest.substr(1, close - 1))) {
            if (!v.empty() || q) col.domain.push_back(v);
          }
          if (col.domain.empty()) Fail(ErrorCode::kParse, "malformed @attribute line" + where);
          col.numeric = false;
        } else {
          std::string type = Lower(TakeToken(rest));
          if (type == "numeric" || type == "real" || type == "integer") {
            col.numeric = true;
          } else {
            Fail(ErrorCode::kParse, "malformed @attribute line: unsupported type '" + type + "'" + where);
          }
        }
        columns.push_back(std::move(col));
      } else if (keyword == "@data") {
        if (columns.empty()) Fail(ErrorCode::kParse, "ARFF header declares no attributes");
        in_data = true;
      } else {
        Fail(ErrorCode::kParse, "unknown ARFF keyword '" + keyword + "'" + where);
      }
      continue;
    }
    if (line.front() == '{') Fail(ErrorCode::kParse, "sparse ARFF rows are not supported" + where);
    auto values = SplitArffValues(line);
    if (values.size() != columns.size()) {
      Fail(ErrorCode::kParse, "data row arity mismatch: " + std::to_string(values.size()) +
                                  " values, header declares " + std::to_string(columns.size()) +
                                  where);
    }
    for (size_t j = 0; j < values.size(); ++j) {
      auto& [v, q] = values[j];
      if (!q && (v == "?" || v.empty())) {
        columns[j].cells.emplace_back(std::nullopt);
      } else {
        columns[j].cells.emplace_back(v);
      }
    }
  }
  if (!in_data) Fail(ErrorCode::kParse, "ARFF file has no @data section");

  size_t label_index = columns.size();
  if (target) {
    for (size_t j = 0; j < columns.size(); ++j) {
      if (columns[j].name == *target) label_index = j;
    }
  } else {
    for (size_t j = columns.size(); j-- > 0;) {
      if (!columns[j].numeric) {
        label_index = j;
        break;
      }
    }
  }
  if (label_index == columns.size()) Fail(ErrorCode::kParse, "label column absent");
  return BuildDataset(std::move(relation), std::move(columns), label_index);
}

Dataset LoadArff(const std::filesystem::path& path, const std::optional<std::string>& target) {
  return ParseArff(ReadFile(path), target, path.stem().string());
}

Dataset LoadDataset(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) Fail(ErrorCode::kIo, "no such file: " + path.string());
  Dataset d = Lower(path.extension().string()) == ".arff" ? LoadArff(path) : LoadCsv(path);
  d.name = path.stem().string();
  return d;
}

namespace {

std::string FormatCell(std::string_view s, char delim) {
  bool needs_quotes = s.find_first_of(std::string{delim, '"', '\n', '\r'}) != std::string_view::npos;
  if (!needs_quotes) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string FormatDouble(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

void SaveCsv(const Dataset& d, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  auto columns = d.columns.size() == d.cols() ? d.columns : NumericColumns(d.cols());
  // Categorical columns holding non-code values (e.g. interpolated rows) are
  // written numerically.
  for (size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].kind != ColumnKind::kCategorical) continue;
    for (size_t i = 0; i < d.rows(); ++i) {
      const double v = d.features(i, j);
      if (v != std::floor(v) || v < 0 || v >= static_cast<double>(columns[j].categories.size())) {
        columns[j].kind = ColumnKind::kNumeric;
        break;
      }
    }
  }
  for (size_t j = 0; j < columns.size(); ++j) out << FormatCell(columns[j].name, ',') << ',';
  out << "class\n";
  for (size_t i = 0; i < d.rows(); ++i) {
    for (size_t j = 0; j < columns.size(); ++j) {
      const double v = d.features(i, j);
      const auto& meta = columns[j];
      const auto code = static_cast<long long>(v);
      if (meta.kind == ColumnKind::kCategorical && static_cast<double>(code) == v && code >= 0 &&
          static_cast<size_t>(code) < meta.categories.size()) {
        out << FormatCell(meta.categories[static_cast<size_t>(code)], ',');
      } else {
        out << FormatDouble(v);
      }
      out << ',';
    }
    out << FormatCell(d.label_names[static_cast<size_t>(d.labels[i])], ',') << '\n';
  }
  if (!out) Fail(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace imbal
