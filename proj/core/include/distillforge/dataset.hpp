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

#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "distillforge/matrix.hpp"

namespace distillforge::data {

enum class ColumnKind { numeric, categorical };
enum class ColumnRole { feature, target, sensitive, ignore };

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  ColumnRole role = ColumnRole::feature;
  // Optional declared class order for the target column. When present,
  // label values outside this list are rejected.
  std::vector<std::string> classes;
};

// Column roles for a CSV file. Exactly one target, unique names, and at
// least one feature column.
struct Schema {
  std::vector<ColumnSpec> columns;

  void validate() const;
  static Schema from_json(std::string_view text);
  static Schema load(const std::filesystem::path& path);
  std::string to_json() const;
};

struct Dataset {
  Matrix features;  // categoricals hold integer codes; missing cells hold NaN
  std::vector<int> labels;
  int class_count = 0;
  std::vector<std::string> feature_names;
  std::vector<ColumnKind> feature_kinds;
  std::vector<std::vector<std::string>> category_levels;  // per feature, empty for numeric
  std::vector<std::string> class_names;
  std::map<std::string, std::vector<int>> sensitive;  // attribute -> per-row group id
  std::vector<std::uint8_t> missing_mask;             // rows x features, row-major

  std::size_t rows() const noexcept { return labels.size(); }
  std::size_t feature_count() const noexcept { return features.cols(); }
  bool is_missing(std::size_t r, std::size_t c) const {
    return missing_mask[r * feature_count() + c] != 0;
  }
  std::vector<std::size_t> class_counts() const;

  // Throws ValidationError when shapes disagree, a label is out of range,
  // or a class has no rows.
  void validate() const;

  // Rows in the order listed; class_count and column metadata are kept.
  Dataset subset(std::span<const std::size_t> rows) const;
};

Dataset load_csv(const std::filesystem::path& path, const std::filesystem::path& schema_path);
Dataset load_csv(const std::filesystem::path& path, const Schema& schema);
Dataset parse_csv(std::istream& in, const Schema& schema);

// Writes the dataset back out as CSV plus a schema sidecar that reloads it.
void write_csv(const Dataset& ds, const std::filesystem::path& csv_path,
               const std::filesystem::path& schema_path);

enum class ImputeStrategy { zero, median };

ImputeStrategy parse_impute_strategy(std::string_view name);

// Fills NaN cells; missing_mask is left untouched.
Dataset impute(const Dataset& ds, ImputeStrategy strategy);

struct FoldAssignment {
  std::vector<int> fold_of;
  int k = 0;
  std::uint64_t seed = 0;

  std::size_t rows() const noexcept { return fold_of.size(); }
  std::vector<std::size_t> rows_in(int fold) const;
  std::vector<std::size_t> rows_outside(int fold) const;

  std::string to_json() const;
  static FoldAssignment from_json(std::string_view text);
  friend bool operator==(const FoldAssignment&, const FoldAssignment&) = default;
};

// Shuffle within each class, then deal round-robin. The dealing position
// carries over between classes so total fold sizes also differ by at most 1.
FoldAssignment stratified_kfold(std::span<const int> labels, int class_count, int k,
                                std::uint64_t seed);
FoldAssignment stratified_kfold(const Dataset& ds, int k, std::uint64_t seed);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Per-class test count is round(fraction * class size), clamped so both
// sides keep at least one row of every class. Indices come back sorted.
SplitIndices stratified_split_indices(std::span<const int> labels, int class_count,
                                      double test_fraction, std::uint64_t seed);
std::pair<Dataset, Dataset> train_test_split(const Dataset& ds, double test_fraction,
                                             std::uint64_t seed);

// Stratified subsample to about max_rows rows (per-class rounding); no-op when
// the dataset is already small enough.
Dataset stratified_subsample(const Dataset& ds, std::size_t max_rows, std::uint64_t seed);

struct SynthConfig {
  std::size_t n = 1000;
  std::size_t d = 20;
  int classes = 2;
  double cluster_sep = 1.5;
  double label_noise = 0.0;
  double group_bias = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
  std::string to_json() const;
  static SynthConfig from_json(std::string_view text);
};

// Gaussian clusters with a quadratic (per-class diagonal metric) labeling rule.
// Sensitive attribute "group" is binary and loads on feature 0 with weight
// group_bias.
Dataset synth_generate(const SynthConfig& cfg);

// The noise-free label the generator would assign to a feature row.
int synth_bayes_label(const SynthConfig& cfg, std::span<const double> x);

}  // namespace distillforge::data
