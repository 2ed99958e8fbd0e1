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
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "distillforge/dataset.hpp"
#include "distillforge/matrix.hpp"

namespace distillforge::teacher {

// Out-of-fold class-probability vectors plus the audit trail of which rows
// each fold's teacher instance was fitted on.
struct SoftLabelSet {
  int class_count = 0;
  Matrix probs;  // rows x class_count
  std::vector<int> fold_of;
  std::string teacher_id;
  std::vector<std::vector<std::size_t>> seen_sets;  // per fold, sorted ascending

  std::size_t rows() const noexcept { return fold_of.size(); }

  // Row sums within 1e-9 of 1, entries in [0, 1], shapes consistent.
  void validate() const;
};

enum class TeacherKind { knn, bagged_tree, file };

struct TeacherSpec {
  TeacherKind kind = TeacherKind::knn;
  std::size_t knn_k = 0;  // 0 selects ceil(sqrt(n))
  int trees = 50;
  int depth = 8;
  std::uint64_t seed = 0;
  std::filesystem::path path;  // file teachers only

  void validate() const;
  std::string id() const;

  // "knn", "knn:k=7", "bagged", "bagged:trees=50,depth=8,seed=3", "file:PATH".
  static TeacherSpec parse(std::string_view text);
};

// A fitted teacher: maps feature rows to probability vectors.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual Matrix predict_proba(const Matrix& rows) const = 0;
  virtual int class_count() const = 0;
};

// Distance-weighted k-NN over z-scored features. Votes are normalised to sum
// to k and Laplace-smoothed: p_c = (vote_c + 1) / (k + C).
class KnnTeacher final : public Predictor {
 public:
  static KnnTeacher fit(const data::Dataset& train, std::size_t k = 0);

  Matrix predict_proba(const Matrix& rows) const override;
  int class_count() const override { return class_count_; }
  std::size_t k() const noexcept { return k_; }

 private:
  Matrix train_;  // z-scored
  std::vector<int> labels_;
  std::vector<double> mean_;
  std::vector<double> scale_;
  std::size_t k_ = 1;
  int class_count_ = 2;
};

// Bootstrap-bagged CART classifiers (Gini splits). Each leaf stores
// (count_c + 1) / (n_leaf + C); predictions average the trees.
class BaggedTreeTeacher final : public Predictor {
 public:
  static BaggedTreeTeacher fit(const data::Dataset& train, int trees, int depth, std::uint64_t seed);

  Matrix predict_proba(const Matrix& rows) const override;
  int class_count() const override { return class_count_; }
  std::size_t tree_count() const noexcept { return trees_.size(); }

  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::vector<double> probs;
  };

 private:
  std::vector<std::vector<Node>> trees_;
  int class_count_ = 2;
};

std::unique_ptr<Predictor> fit_teacher(const TeacherSpec& spec, const data::Dataset& train);

// For each fold k, fits a fresh teacher on the rows outside k and predicts
// only the rows inside k. File teachers are imported and checked instead.
SoftLabelSet oof_label(const data::Dataset& ds, const data::FoldAssignment& folds,
                       const TeacherSpec& spec);

// Equal-weight elementwise mean. Result is independent of list order.
SoftLabelSet average_teachers(std::span<const SoftLabelSet> sets);

struct AuditReport {
  bool passed = true;
  std::vector<std::size_t> offending_rows;
};

AuditReport leakage_audit(const SoftLabelSet& set);

// CSV: row_id,fold_id,teacher_id,p0,...,p{C-1}.
void export_soft_labels(const SoftLabelSet& set, const std::filesystem::path& path);
std::string format_soft_labels(const SoftLabelSet& set);

// strict rejects any row whose fold_id disagrees with the assignment.
// provenance keeps the file's fold ids as the audit trail so leakage_audit
// can report the disagreeing rows instead.
enum class FoldCheck { strict, provenance };

SoftLabelSet import_soft_labels(const std::filesystem::path& path, const data::Dataset& ds,
                                const data::FoldAssignment& folds, FoldCheck check = FoldCheck::strict);
SoftLabelSet parse_soft_labels(std::string_view text, const data::Dataset& ds,
                               const data::FoldAssignment& folds, FoldCheck check = FoldCheck::strict);

}  // namespace distillforge::teacher
