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

#include "distillforge/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "distillforge/error.hpp"
#include "distillforge/random.hpp"

namespace distillforge::data {

using nlohmann::json;

namespace {

ColumnKind parse_kind(const std::string& s) {
  if (s == "numeric") return ColumnKind::numeric;
  if (s == "categorical") return ColumnKind::categorical;
  throw ValidationError("schema: unknown column kind '" + s + "'");
}

ColumnRole parse_role(const std::string& s) {
  if (s == "feature") return ColumnRole::feature;
  if (s == "target") return ColumnRole::target;
  if (s == "sensitive") return ColumnRole::sensitive;
  if (s == "ignore") return ColumnRole::ignore;
  throw ValidationError("schema: unknown column role '" + s + "'");
}

const char* kind_name(ColumnKind k) { return k == ColumnKind::numeric ? "numeric" : "categorical"; }

const char* role_name(ColumnRole r) {
  switch (r) {
    case ColumnRole::feature: return "feature";
    case ColumnRole::target: return "target";
    case ColumnRole::sensitive: return "sensitive";
    case ColumnRole::ignore: return "ignore";
  }
  return "feature";
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

void Schema::validate() const {
  std::set<std::string> names;
  int targets = 0;
  int features = 0;
  for (const auto& c : columns) {
    if (c.name.empty()) throw ValidationError("schema: empty column name");
    if (!names.insert(c.name).second) throw ValidationError("schema: duplicate column '" + c.name + "'");
    if (c.role == ColumnRole::target) ++targets;
    if (c.role == ColumnRole::feature) ++features;
  }
  if (targets == 0) throw ValidationError("schema: no target column");
  if (targets > 1) throw ValidationError("schema: more than one target column");
  if (features == 0) throw ValidationError("schema: no feature column");
}

Schema Schema::from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("schema: ") + e.what());
  }
  if (!j.is_object() || !j.contains("columns") || !j["columns"].is_array())
    throw ValidationError("schema: expected an object with a \"columns\" array");
  Schema s;
  for (const auto& c : j["columns"]) {
    ColumnSpec spec;
    spec.name = c.at("name").get<std::string>();
    spec.kind = parse_kind(c.value("kind", std::string("numeric")));
    spec.role = parse_role(c.value("role", std::string("feature")));
    if (c.contains("classes")) {
      for (const auto& v : c["classes"]) spec.classes.push_back(v.is_string() ? v.get<std::string>() : v.dump());
    }
    s.columns.push_back(std::move(spec));
  }
  s.validate();
  return s;
}

Schema Schema::load(const std::filesystem::path& path) { return from_json(read_file(path)); }

std::string Schema::to_json() const {
  json cols = json::array();
  for (const auto& c : columns) {
    json o = {{"name", c.name}, {"kind", kind_name(c.kind)}, {"role", role_name(c.role)}};
    if (!c.classes.empty()) o["classes"] = c.classes;
    cols.push_back(o);
  }
  return json{{"columns", cols}}.dump(2) + "\n";
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(std::max(class_count, 0)), 0);
  for (int y : labels)
    if (y >= 0 && y < class_count) ++counts[static_cast<std::size_t>(y)];
  return counts;
}

void Dataset::validate() const {
  if (class_count < 2) throw ValidationError("dataset: need at least 2 classes");
  if (features.rows() != labels.size())
    throw ValidationError("dataset: feature and label row counts differ");
  if (missing_mask.size() != features.rows() * features.cols())
    throw ValidationError("dataset: missing mask shape mismatch");
  if (feature_names.size() != features.cols() || feature_kinds.size() != features.cols())
    throw ValidationError("dataset: column metadata does not match feature count");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= class_count)
      throw ValidationError("dataset: label " + std::to_string(labels[i]) + " at row " +
                            std::to_string(i) + " outside [0, " + std::to_string(class_count) + ")");
  }
  auto counts = class_counts();
  for (std::size_t c = 0; c < counts.size(); ++c)
    if (counts[c] == 0) throw ValidationError("dataset: class " + std::to_string(c) + " has no rows");
  for (const auto& [name, groups] : sensitive)
    if (groups.size() != labels.size())
      throw ValidationError("dataset: sensitive attribute '" + name + "' row count mismatch");
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.features = features.select_rows(rows);
  out.labels.reserve(rows.size());
  for (auto r : rows) out.labels.push_back(labels[r]);
  out.class_count = class_count;
  out.feature_names = feature_names;
  out.feature_kinds = feature_kinds;
  out.category_levels = category_levels;
  out.class_names = class_names;
  for (const auto& [name, groups] : sensitive) {
    auto& dst = out.sensitive[name];
    dst.reserve(rows.size());
    for (auto r : rows) dst.push_back(groups[r]);
  }
  const std::size_t d = feature_count();
  out.missing_mask.reserve(rows.size() * d);
  for (auto r : rows)
    out.missing_mask.insert(out.missing_mask.end(), missing_mask.begin() + static_cast<std::ptrdiff_t>(r * d),
                            missing_mask.begin() + static_cast<std::ptrdiff_t>((r + 1) * d));
  return out;
}

ImputeStrategy parse_impute_strategy(std::string_view name) {
  if (name == "zero") return ImputeStrategy::zero;
  if (name == "median") return ImputeStrategy::median;
  throw ValidationError("unknown impute strategy '" + std::string(name) + "'");
}

Dataset impute(const Dataset& ds, ImputeStrategy strategy) {
  Dataset out = ds;
  const std::size_t n = ds.rows();
  for (std::size_t c = 0; c < ds.feature_count(); ++c) {
    bool any_missing = false;
    std::vector<double> present;
    present.reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
      const double v = ds.features(r, c);
      if (std::isnan(v))
        any_missing = true;
      else
        present.push_back(v);
    }
    if (!any_missing) continue;
    double fill = 0.0;
    if (strategy == ImputeStrategy::median) {
      if (present.empty())
        throw ValidationError("impute: column '" + ds.feature_names[c] + "' is entirely missing");
      std::sort(present.begin(), present.end());
      const std::size_t m = present.size();
      fill = m % 2 == 1 ? present[m / 2] : 0.5 * (present[m / 2 - 1] + present[m / 2]);
    }
    for (std::size_t r = 0; r < n; ++r)
      if (std::isnan(out.features(r, c))) out.features(r, c) = fill;
  }
  return out;
}

std::vector<std::size_t> FoldAssignment::rows_in(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] == fold) out.push_back(i);
  return out;
}

std::vector<std::size_t> FoldAssignment::rows_outside(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] != fold) out.push_back(i);
  return out;
}

std::string FoldAssignment::to_json() const {
  return json{{"k", k}, {"seed", seed}, {"fold_of", fold_of}}.dump() + "\n";
}

FoldAssignment FoldAssignment::from_json(std::string_view text) {
  try {
    auto j = json::parse(text);
    FoldAssignment f;
    f.k = j.at("k").get<int>();
    f.seed = j.at("seed").get<std::uint64_t>();
    f.fold_of = j.at("fold_of").get<std::vector<int>>();
    for (int v : f.fold_of)
      if (v < 0 || v >= f.k) throw ValidationError("folds: fold id out of range");
    return f;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("folds: ") + e.what());
  }
}

namespace {

std::vector<std::vector<std::size_t>> rows_by_class(std::span<const int> labels, int class_count) {
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(class_count));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int y = labels[i];
    if (y < 0 || y >= class_count) throw ValidationError("label out of range at row " + std::to_string(i));
    by_class[static_cast<std::size_t>(y)].push_back(i);
  }
  return by_class;
}

}  // namespace

FoldAssignment stratified_kfold(std::span<const int> labels, int class_count, int k,
                                std::uint64_t seed) {
  if (k < 2) throw ValidationError("stratified_kfold: K must be at least 2");
  auto by_class = rows_by_class(labels, class_count);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    if (!by_class[c].empty() && by_class[c].size() < static_cast<std::size_t>(k))
      throw ValidationError("stratified_kfold: class " + std::to_string(c) + " has " +
                            std::to_string(by_class[c].size()) + " rows, fewer than K=" +
                            std::to_string(k));
  }
  FoldAssignment out;
  out.k = k;
  out.seed = seed;
  out.fold_of.assign(labels.size(), -1);
  Rng rng(seed);
  std::size_t deal = 0;
  for (auto& rows : by_class) {
    rng.shuffle(std::span<std::size_t>(rows));
    for (auto r : rows) {
      out.fold_of[r] = static_cast<int>(deal % static_cast<std::size_t>(k));
      ++deal;
    }
  }
  return out;
}

FoldAssignment stratified_kfold(const Dataset& ds, int k, std::uint64_t seed) {
  return stratified_kfold(ds.labels, ds.class_count, k, seed);
}

SplitIndices stratified_split_indices(std::span<const int> labels, int class_count,
                                      double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw ValidationError("split: test fraction must lie in (0, 1)");
  auto by_class = rows_by_class(labels, class_count);
  SplitIndices out;
  Rng rng(seed);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& rows = by_class[c];
    if (rows.empty()) continue;
    if (rows.size() < 2)
      throw ValidationError("split: class " + std::to_string(c) +
                            " has fewer than 2 rows; one side would lack it");
    rng.shuffle(std::span<std::size_t>(rows));
    auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(rows.size())));
    n_test = std::clamp<std::size_t>(n_test, 1, rows.size() - 1);
    out.test.insert(out.test.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_test));
    out.train.insert(out.train.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_test), rows.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& ds, double test_fraction,
                                             std::uint64_t seed) {
  auto idx = stratified_split_indices(ds.labels, ds.class_count, test_fraction, seed);
  return {ds.subset(idx.train), ds.subset(idx.test)};
}

Dataset stratified_subsample(const Dataset& ds, std::size_t max_rows, std::uint64_t seed) {
  if (max_rows == 0) throw ValidationError("max_rows must be positive");
  if (ds.rows() <= max_rows) return ds;
  const double keep = static_cast<double>(max_rows) / static_cast<double>(ds.rows());
  auto idx = stratified_split_indices(ds.labels, ds.class_count, keep, seed);
  return ds.subset(idx.test);
}

}  // namespace distillforge::data
