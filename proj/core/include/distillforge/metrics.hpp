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

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "distillforge/matrix.hpp"

namespace distillforge::metrics {

// Mann-Whitney AUC with midranks. labels are 0/1; both must be present.
double auc(std::span<const double> scores, std::span<const int> labels);

// Mean one-vs-rest AUC over the classes present in labels.
double macro_auc(const Matrix& probs, std::span<const int> labels);

// AUC for binary probability matrices, macro AUC otherwise.
double task_auc(const Matrix& probs, std::span<const int> labels);

double retention(double student_auc, double teacher_auc);

inline constexpr std::size_t kDefaultEceBins = 15;

double ece(const Matrix& probs, std::span<const int> labels, std::size_t bins = kDefaultEceBins);

// Mean over rows of sum_c (p_c - onehot_c)^2.
double brier(const Matrix& probs, std::span<const int> labels);
// Mean (p1 - y)^2; binary tasks only.
double brier_binary(const Matrix& probs, std::span<const int> labels);

struct TemperatureSearch {
  double lo = 0.05;
  double hi = 20.0;
  double tol = 1e-3;
};

// Mean cross-entropy of softmax(logits / T).
double cross_entropy(const Matrix& logits, std::span<const int> labels, double temperature = 1.0);

// Golden-section search for the global temperature; falls back to T = 1
// whenever that is at least as good.
double fit_temperature(const Matrix& logits, std::span<const int> labels, const TemperatureSearch& search = {});

// Row-wise log of clipped probabilities, usable as logits.
Matrix log_probs(const Matrix& probs);
Matrix apply_temperature(const Matrix& logits, double temperature);

std::vector<int> decisions(const Matrix& probs, double threshold = 0.5);

// Max minus min positive-decision rate across groups present.
double dp_diff(std::span<const int> decisions, std::span<const int> groups);

enum class EoVariant { opportunity, odds };

struct EoResult {
  double value = 0.0;
  std::vector<int> excluded_groups;  // groups without positive labels
};

// Equal opportunity: TPR gap. The odds variant takes the larger of the TPR
// and FPR gaps.
EoResult eo_diff(std::span<const int> decisions, std::span<const int> labels, std::span<const int> groups,
                 EoVariant variant = EoVariant::opportunity);

struct EvalOptions {
  std::size_t ece_bins = kDefaultEceBins;
  double threshold = 0.5;
  EoVariant eo_variant = EoVariant::opportunity;
  TemperatureSearch search;
};

struct EvalReport {
  double auc = 0.0;
  std::optional<double> retention_pct;
  double ece = 0.0;
  double brier = 0.0;
  double ece_ts = 0.0;
  double brier_ts = 0.0;
  double fitted_temperature = 1.0;
  std::map<std::string, double> dp_diff;
  std::map<std::string, double> eo_diff;
  std::map<std::string, std::vector<int>> eo_excluded_groups;
  std::size_t n_test = 0;
  std::size_t n_calibration = 0;
  std::size_t ece_bins = kDefaultEceBins;
  double threshold = 0.5;
  std::string eo_variant = "opportunity";

  std::string to_json() const;
  static EvalReport from_json(std::string_view text);
  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

struct EvalInput {
  Matrix test_logits;
  std::span<const int> test_labels;
  std::map<std::string, std::vector<int>> sensitive;  // test rows only
  Matrix calib_logits;
  std::span<const int> calib_labels;
  std::optional<double> teacher_auc;
};

EvalReport evaluate(const EvalInput& input, const EvalOptions& options = {});

}  // namespace distillforge::metrics
