// Copyright 2026 The DistillForge Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <unordered_map>

#include "distillforge/dataset.hpp"
#include "distillforge/error.hpp"

namespace distillforge::data {

namespace {

// Splits one CSV record. Handles double-quoted fields with "" escapes;
// records spanning lines are not supported.
std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(ch);
    }
  }
  out.push_back(std::move(field));
  return out;
}

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

bool is_missing_cell(const std::string& s) { return s.empty() || s == "NA"; }

bool parse_double(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::string where(std::size_t data_row, const std::string& column) {
  return "row " + std::to_string(data_row) + ", column '" + column + "'";
}

// First-appearance integer coding of string values.
class Coder {
 public:
  int code(const std::string& value) {
    auto [it, inserted] = index_.try_emplace(value, static_cast<int>(levels_.size()));
    if (inserted) levels_.push_back(value);
    return it->second;
  }
  const std::vector<std::string>& levels() const { return levels_; }

 private:
  std::unordered_map<std::string, int> index_;
  std::vector<std::string> levels_;
};

std::string format_cell(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

Dataset parse_csv(std::istream& in, const Schema& schema) {
  schema.validate();
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("csv: empty file, header row required");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  auto header = split_record(line);
  for (auto& h : header) h = trim(h);

  std::unordered_map<std::string, std::size_t> spec_index;
  for (std::size_t i = 0; i < schema.columns.size(); ++i) spec_index[schema.columns[i].name] = i;

  // header position -> schema column
  std::vector<std::size_t> column_spec(header.size());
  std::vector<bool> seen(schema.columns.size(), false);
  for (std::size_t h = 0; h < header.size(); ++h) {
    auto it = spec_index.find(header[h]);
    if (it == spec_index.end()) throw ValidationError("csv: unknown column '" + header[h] + "'");
    if (seen[it->second]) throw ValidationError("csv: duplicate header column '" + header[h] + "'");
    seen[it->second] = true;
    column_spec[h] = it->second;
  }
  for (std::size_t i = 0; i < schema.columns.size(); ++i)
    if (!seen[i]) throw ValidationError("csv: schema column '" + schema.columns[i].name + "' missing from header");

  Dataset ds;
  std::vector<std::size_t> feature_positions;
  std::vector<std::size_t> sensitive_positions;
  std::size_t target_position = 0;
  for (std::size_t h = 0; h < header.size(); ++h) {
    const auto& spec = schema.columns[column_spec[h]];
    switch (spec.role) {
      case ColumnRole::feature:
        feature_positions.push_back(h);
        ds.feature_names.push_back(spec.name);
        ds.feature_kinds.push_back(spec.kind);
        break;
      case ColumnRole::target: target_position = h; break;
      case ColumnRole::sensitive: sensitive_positions.push_back(h); break;
      case ColumnRole::ignore: break;
    }
  }
  const auto& target_spec = schema.columns[column_spec[target_position]];
  const std::size_t d = feature_positions.size();

  std::vector<Coder> feature_coders(d);
  std::vector<Coder> sensitive_coders(sensitive_positions.size());
  Coder target_coder;
  std::unordered_map<std::string, int> declared;
  for (std::size_t i = 0; i < target_spec.classes.size(); ++i) declared[target_spec.classes[i]] = static_cast<int>(i);

  std::vector<double> values;
  std::vector<std::vector<int>> sensitive_values(sensitive_positions.size());
  int max_numeric_label = -1;
  std::size_t data_row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_record(line);
    if (cells.size() != header.size())
      throw ValidationError("csv: row " + std::to_string(data_row) + " has " + std::to_string(cells.size()) +
                            " cells, header has " + std::to_string(header.size()));
    for (auto& c : cells) c = trim(c);

    for (std::size_t f = 0; f < d; ++f) {
      const auto& cell = cells[feature_positions[f]];
      if (is_missing_cell(cell)) {
        values.push_back(std::numeric_limits<double>::quiet_NaN());
        ds.missing_mask.push_back(1);
        continue;
      }
      ds.missing_mask.push_back(0);
      if (ds.feature_kinds[f] == ColumnKind::categorical) {
        values.push_back(feature_coders[f].code(cell));
      } else {
        double v = 0.0;
        if (!parse_double(cell, v))
          throw ValidationError("csv: non-numeric value '" + cell + "' at " + where(data_row, ds.feature_names[f]));
        values.push_back(v);
      }
    }

    const auto& label_cell = cells[target_position];
    if (is_missing_cell(label_cell))
      throw ValidationError("csv: missing label at " + where(data_row, target_spec.name));
    int label = 0;
    if (!declared.empty()) {
      auto it = declared.find(label_cell);
      if (it == declared.end())
        throw ValidationError("csv: label '" + label_cell + "' outside declared classes at " +
                              where(data_row, target_spec.name));
      label = it->second;
    } else if (target_spec.kind == ColumnKind::categorical) {
      label = target_coder.code(label_cell);
    } else {
      double v = 0.0;
      if (!parse_double(label_cell, v) || v < 0 || v != std::floor(v) || v > 1e6)
        throw ValidationError("csv: label '" + label_cell + "' is not a class id at " +
                              where(data_row, target_spec.name));
      label = static_cast<int>(v);
      max_numeric_label = std::max(max_numeric_label, label);
    }
    ds.labels.push_back(label);

    for (std::size_t s = 0; s < sensitive_positions.size(); ++s) {
      const auto& cell = cells[sensitive_positions[s]];
      sensitive_values[s].push_back(sensitive_coders[s].code(is_missing_cell(cell) ? std::string("NA") : cell));
    }
    ++data_row;
  }

  ds.features = Matrix(data_row, d, std::move(values));
  for (std::size_t f = 0; f < d; ++f) ds.category_levels.push_back(feature_coders[f].levels());
  if (!declared.empty()) {
    ds.class_count = static_cast<int>(target_spec.classes.size());
    ds.class_names = target_spec.classes;
  } else if (target_spec.kind == ColumnKind::categorical) {
    ds.class_count = static_cast<int>(target_coder.levels().size());
    ds.class_names = target_coder.levels();
  } else {
    ds.class_count = max_numeric_label + 1;
    for (int c = 0; c < ds.class_count; ++c) ds.class_names.push_back(std::to_string(c));
  }
  for (std::size_t s = 0; s < sensitive_positions.size(); ++s)
    ds.sensitive[schema.columns[column_spec[sensitive_positions[s]]].name] = std::move(sensitive_values[s]);
  ds.validate();
  return ds;
}

Dataset load_csv(const std::filesystem::path& path, const Schema& schema) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return parse_csv(in, schema);
}

Dataset load_csv(const std::filesystem::path& path, const std::filesystem::path& schema_path) {
  return load_csv(path, Schema::load(schema_path));
}

void write_csv(const Dataset& ds, const std::filesystem::path& csv_path,
               const std::filesystem::path& schema_path) {
  Schema schema;
  for (std::size_t f = 0; f < ds.feature_count(); ++f)
    schema.columns.push_back({ds.feature_names[f], ds.feature_kinds[f], ColumnRole::feature, {}});
  for (const auto& [name, groups] : ds.sensitive)
    schema.columns.push_back({name, ColumnKind::categorical, ColumnRole::sensitive, {}});
  schema.columns.push_back({"label", ColumnKind::categorical, ColumnRole::target, ds.class_names});

  std::ofstream out(csv_path);
  if (!out) throw ValidationError("cannot write " + csv_path.string());
  for (std::size_t i = 0; i < schema.columns.size(); ++i)
    out << (i ? "," : "") << quote_if_needed(schema.columns[i].name);
  out << "\n";
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    for (std::size_t f = 0; f < ds.feature_count(); ++f) {
      if (f) out << ",";
      const double v = ds.features(r, f);
      if (std::isnan(v)) continue;
      if (ds.feature_kinds[f] == ColumnKind::categorical && !ds.category_levels[f].empty())
        out << quote_if_needed(ds.category_levels[f][static_cast<std::size_t>(v)]);
      else
        out << format_cell(v);
    }
    for (const auto& [name, groups] : ds.sensitive) out << "," << groups[r];
    out << "," << quote_if_needed(ds.class_names[static_cast<std::size_t>(ds.labels[r])]) << "\n";
  }
  std::ofstream sout(schema_path);
  if (!sout) throw ValidationError("cannot write " + schema_path.string());
  sout << schema.to_json();
}

}  // namespace distillforge::data
