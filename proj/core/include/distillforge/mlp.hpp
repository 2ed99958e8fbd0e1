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
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "distillforge/dataset.hpp"
#include "distillforge/distill.hpp"
#include "distillforge/encoder.hpp"
#include "distillforge/matrix.hpp"

namespace distillforge::mlp {

struct TrainSchedule {
  int epochs = 200;
  double warmup_fraction = 0.1;
  double peak_lr = 1e-3;
  std::size_t batch_size = 64;
  double swa_start_fraction = 0.8;
  double smoothing = 0.05;
  double augment_sigma = 0.05;  // jitter std as a multiple of per-feature std; 0 disables
  int max_restarts = 3;
  double dropout = 0.1;
  double momentum = 0.9;
  double val_fraction = 0.15;
  std::size_t hidden_width = 0;  // 0 selects clamp(n / 8, 32, 256)

  void validate() const;
  std::string to_json() const;
  static TrainSchedule from_json(std::string_view text);
  friend bool operator==(const TrainSchedule&, const TrainSchedule&) = default;
};

std::size_t embedding_width(std::size_t input_width);
std::size_t hidden_width_for(std::size_t rows);

// Linear warmup from 0 to peak over the first warmup_fraction of steps, then
// cosine decay to 0.
double learning_rate_at(const TrainSchedule& sched, std::size_t step, std::size_t total_steps);

// Architecture: linear embedding (input -> E), two residual blocks
// z += W2 dropout(relu(W1 z + b1)) + b2 with hidden width H, and a linear
// head (E -> C). All parameters live in one flat vector.
struct MlpParams {
  std::size_t input = 0;
  std::size_t embed = 0;
  std::size_t hidden = 0;
  std::size_t classes = 0;
  std::vector<double> values;

  static MlpParams zeros(std::size_t input, std::size_t embed, std::size_t hidden, std::size_t classes);
  static std::size_t count(std::size_t input, std::size_t embed, std::size_t hidden, std::size_t classes);
  bool all_finite() const;
  friend bool operator==(const MlpParams&, const MlpParams&) = default;
};

// Logits for already-encoded inputs, without dropout.
Matrix forward_logits(const MlpParams& params, const Matrix& encoded);

// Gradient of mixed_loss (summed over rows) with respect to every parameter,
// without dropout. Same layout as params.values.
std::vector<double> loss_gradient(const MlpParams& params, const Matrix& encoded,
                                  const distill::DistillTargets& targets, const distill::LossConfig& cfg,
                                  double smoothing);

enum class Health { healthy, collapsed };

// Collapsed when mean normalised prediction entropy is below
// entropy_threshold and one class takes more than dominance_threshold of
// the argmaxes, or when the parameters are not finite.
Health collapse_check(const Matrix& val_probs, double entropy_threshold = 0.01,
                      double dominance_threshold = 0.99, bool params_finite = true);

struct RestartPlan {
  double dropout = 0.1;
  std::uint64_t seed = 0;
};

// dropout <- min(0.5, max(current, 0.1) * 1.5); seed <- base_seed + attempt.
RestartPlan restart_policy(double current_dropout, int attempt, std::uint64_t base_seed);

struct MlpModel {
  data::FeatureEncoder encoder;
  MlpParams params;
  double dropout = 0.1;
  bool swa = false;
  bool collapsed = false;
  int restarts = 0;
  std::uint64_t seed = 0;

  Matrix logits(const Matrix& rows) const;
  Matrix predict_proba(const Matrix& rows) const;

  std::string serialize() const;
  static MlpModel deserialize(std::string_view text);
};

// Optional instrumentation for tests and diagnostics.
struct FitHooks {
  // Called with each parameter snapshot that enters the SWA average.
  std::function<void(int epoch, const MlpParams&)> on_swa_snapshot;
  // Called at every restart with the new dropout rate.
  std::function<void(int attempt, double dropout)> on_restart;
  // Forces the collapse detector to fire for (attempt, epoch).
  std::function<bool(int attempt, int epoch)> force_collapse;
};

MlpModel fit_mlp(const data::Dataset& train, const distill::DistillTargets& targets, const TrainSchedule& sched,
                 const distill::LossConfig& cfg, std::uint64_t seed, const FitHooks& hooks = {});

// alpha = 0, w = 1, T = 1 on the one-hot labels.
MlpModel fit_mlp_hard(const data::Dataset& train, const TrainSchedule& sched, std::uint64_t seed,
                      const FitHooks& hooks = {});

Matrix predict_proba(const MlpModel& model, const Matrix& rows);

}  // namespace distillforge::mlp
