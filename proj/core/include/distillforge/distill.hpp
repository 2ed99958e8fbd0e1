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

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "distillforge/matrix.hpp"
#include "distillforge/teacher.hpp"

namespace distillforge::distill {

inline constexpr double kProbClip = 1e-6;

struct LossConfig {
  double alpha = 0.7;
  double t_min = 1.0;
  double t_max = 5.0;
  double mu = 0.7;
  double sigma = 0.2;
  // Ablation switches: a fixed temperature replaces the entropy-adaptive one,
  // and confidence weighting can be turned off (w = 1).
  std::optional<double> fixed_temperature;
  bool confidence_weighting = true;

  void validate() const;
  std::string to_json() const;
  static LossConfig from_json(std::string_view text);
  friend bool operator==(const LossConfig&, const LossConfig&) = default;
};

// H(p) / ln C, with 0 ln 0 = 0.
double normalized_entropy(std::span<const double> p);

// t_min + (t_max - t_min) * normalized_entropy(p), or the fixed temperature.
double adaptive_temperature(std::span<const double> p, const LossConfig& cfg);

// exp(-(H - mu)^2 / (2 sigma^2)) over normalised entropy; 1 when weighting is off.
double confidence_weight(std::span<const double> p, const LossConfig& cfg);

struct DistillTargets {
  int class_count = 0;
  Matrix soft_probs;                // teacher probabilities
  Matrix soft_logits;               // ln clip(p) centred per row
  std::vector<double> binary_logit; // ln(clip(p1) / clip(p0)); binary tasks only
  std::vector<double> temperature;
  std::vector<double> weight;
  std::vector<int> hard_label;

  std::size_t rows() const noexcept { return hard_label.size(); }
  DistillTargets subset(std::span<const std::size_t> rows) const;
};

DistillTargets build_targets(const teacher::SoftLabelSet& soft, std::span<const int> labels,
                             const LossConfig& cfg);
DistillTargets build_targets(const Matrix& soft_probs, std::span<const int> labels,
                             const LossConfig& cfg);

// Targets that reduce the mixed objective to plain cross-entropy on hard
// labels: one-hot soft probabilities, T = 1, w = 1.
DistillTargets hard_targets(std::span<const int> labels, int class_count);

// Softmax of logits / T.
void softmax_at(std::span<const double> logits, double temperature, std::span<double> out);

// alpha * sum w T^2 KL(p~^T || q^T) + (1 - alpha) * sum w CE(y~, q), where y~
// is the one-hot label smoothed by `smoothing`. Returns the sum over rows.
double mixed_loss(const Matrix& student_logits, const DistillTargets& targets, const LossConfig& cfg,
                  double smoothing = 0.0);

// d mixed_loss / d student_logits.
Matrix mixed_gradient_mlp(const Matrix& student_logits, const DistillTargets& targets,
                          const LossConfig& cfg, double smoothing = 0.0);

struct GradPair {
  double grad = 0.0;
  double hess = 0.0;
};

// One scalar tree target: soft logit z, temperature, weight and 0/1 label.
struct ScalarTargets {
  std::vector<double> soft_logit;
  std::vector<double> temperature;
  std::vector<double> weight;
  std::vector<int> label;  // 0 or 1

  std::size_t rows() const noexcept { return label.size(); }
};

// Binary targets, or the one-vs-rest view for class c of a multiclass set.
ScalarTargets binary_view(const DistillTargets& targets);
ScalarTargets one_vs_rest_view(const DistillTargets& targets, int cls);

// Per-row objective on a raw score F:
//   alpha w T^2 (F - z/T)^2 / 2 + (1 - alpha) w logloss(y, sigmoid(F)).
double tree_loss(double raw, double soft_logit, double temperature, double weight, int label,
                 double alpha);
GradPair tree_gradient(double raw, double soft_logit, double temperature, double weight, int label,
                       double alpha);

std::vector<GradPair> mixed_gradient_tree(std::span<const double> raw_score, const ScalarTargets& targets,
                                          const LossConfig& cfg);
std::vector<GradPair> mixed_gradient_tree(std::span<const double> raw_score, const DistillTargets& targets,
                                          const LossConfig& cfg);

double sigmoid(double x);

}  // namespace distillforge::distill
