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
#include <string>
#include <string_view>
#include <vector>

#include "distillforge/dataset.hpp"
#include "distillforge/encoder.hpp"
#include "distillforge/matrix.hpp"

namespace distillforge::baselines {

struct LogRegConfig {
  double l2 = 1.0;
  int max_iter = 500;
  double tol = 1e-6;

  void validate() const;
  std::string to_json() const;
  static LogRegConfig from_json(std::string_view text);
  friend bool operator==(const LogRegConfig&, const LogRegConfig&) = default;
};

// L2-regularised logistic regression on one-hot / z-scored inputs. Binary
// tasks keep one weight row; multiclass tasks keep one row per class.
struct LogRegModel {
  data::FeatureEncoder encoder;
  int class_count = 2;
  Matrix weights;             // slots x encoded width
  std::vector<double> bias;   // one per slot
  double l2 = 1.0;
  bool converged = false;     // false means max_iter was hit
  int iterations = 0;
  double gradient_norm = 0.0;

  Matrix scores(const Matrix& rows) const;
  Matrix predict_proba(const Matrix& rows) const;

  std::string serialize() const;
  static LogRegModel deserialize(std::string_view text);
};

// Minimises sum CE + (l2/2)|w|^2 (bias unpenalised) with damped Newton steps.
LogRegModel fit_logreg(const data::Dataset& train, const LogRegConfig& cfg = {});

// Regularised objective of a model on encoded rows; exposed for tests.
double logreg_objective(const LogRegModel& model, const Matrix& encoded, std::span<const int> labels);

Matrix predict_proba(const LogRegModel& model, const Matrix& rows);

}  // namespace distillforge::baselines
