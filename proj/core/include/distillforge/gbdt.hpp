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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "distillforge/dataset.hpp"
#include "distillforge/distill.hpp"
#include "distillforge/matrix.hpp"

namespace distillforge::gbdt {

struct GbdtConfig {
  int n_trees = 300;
  int max_depth = 6;
  int patience = 30;
  double learning_rate = 0.1;
  std::size_t min_leaf = 5;
  double lambda = 1.0;
  double val_fraction = 0.15;
  std::uint64_t seed = 0;
  // Multiclass tasks are trained one-vs-rest; this is experimental and must
  // be requested explicitly.
  bool one_vs_rest = false;

  void validate() const;
  std::string to_json() const;
  static GbdtConfig from_json(std::string_view text);
  friend bool operator==(const GbdtConfig&, const GbdtConfig&) = default;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool is_leaf() const noexcept { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

// Nodes in breadth-first order; node 0 is the root. Rows with x <= threshold
// or a missing value go left.
using Tree = std::vector<TreeNode>;

double predict_tree(const Tree& tree, std::span<const double> x);
int tree_depth(const Tree& tree);

struct SplitCandidate {
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;
};

// Newton gain of a split: G_L^2/(H_L+lambda) + G_R^2/(H_R+lambda) - G^2/(H+lambda).
double split_gain(double g_left, double h_left, double g_total, double h_total, double lambda);

// Exact sorted scan over one column. Ties keep the lowest threshold; NaN
// rows count towards the left child. Returns nothing when no split has
// positive gain with at least min_leaf rows per side.
std::optional<SplitCandidate> split_finding(std::span<const double> values, std::span<const double> grads,
                                            std::span<const double> hessians, const GbdtConfig& cfg);

// Patience-based early stopping over a stream of validation losses.
class EarlyStopping {
 public:
  explicit EarlyStopping(int patience) : patience_(patience) {}

  // Records the loss after `iteration` (1-based); true means stop now.
  bool update(double loss);

  int best_iteration() const noexcept { return best_iteration_; }
  double best_loss() const noexcept { return best_loss_; }
  int iterations() const noexcept { return iteration_; }

 private:
  int patience_;
  int iteration_ = 0;
  int best_iteration_ = 0;
  double best_loss_ = 0.0;
};

struct BoostedModel {
  int class_count = 2;
  std::size_t feature_count = 0;
  double learning_rate = 0.1;
  double alpha = 0.7;
  std::vector<double> base_scores;         // one per score slot
  std::vector<std::vector<Tree>> trees;    // [slot][iteration]
  int best_iteration = 0;
  std::vector<double> validation_loss;     // per trained iteration
  GbdtConfig config;

  std::size_t slots() const noexcept { return base_scores.size(); }

  // Raw additive scores per slot: base + sum lr * tree(x).
  Matrix raw_scores(const Matrix& rows) const;
  Matrix predict_proba(const Matrix& rows) const;

  std::string serialize() const;
  static BoostedModel deserialize(std::string_view text);
};

// Stratified split of the training rows used for early stopping.
data::SplitIndices validation_split(std::span<const int> labels, int class_count, const GbdtConfig& cfg);

BoostedModel fit_distilled(const data::Dataset& train, const distill::DistillTargets& targets,
                           const distill::LossConfig& loss, const GbdtConfig& cfg);

// Same trainer with alpha = 0, w = 1, T = 1.
BoostedModel fit_hard(const data::Dataset& train, const GbdtConfig& cfg);

Matrix predict_proba(const BoostedModel& model, const Matrix& rows);

}  // namespace distillforge::gbdt
