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
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "distillforge/matrix.hpp"

namespace distillforge::bench {

struct BenchConfig {
  std::size_t warmup = 5;
  std::size_t runs = 50;
};

struct LatencyReport {
  double mean_ms = 0.0;
  double p99_ms = 0.0;
  double min_ms = 0.0;
  double max_ms = 0.0;
  double throughput_per_s = 0.0;
  std::size_t runs = 0;
  std::size_t batch_rows = 0;
  std::size_t model_bytes = 0;

  std::string to_json() const;
  static LatencyReport from_json(std::string_view text);
};

// Nearest-rank quantile: the ceil(q * n)-th smallest sample.
double nearest_rank(std::vector<double> samples, double q);

// Summarises per-run wall times (ms) into a report.
LatencyReport summarize(const std::vector<double>& run_ms, std::size_t batch_rows, std::size_t model_bytes);

using PredictFn = std::function<Matrix(const Matrix&)>;

// Times full-batch prediction on the calling thread. Warmup runs are discarded.
LatencyReport measure(const PredictFn& predict, const Matrix& rows, std::size_t model_bytes,
                      const BenchConfig& cfg = {}, std::vector<double>* run_ms = nullptr);

// Fixed-width text table with Mean ms, P99 ms, Throughput and Size columns.
std::string format_table(const std::vector<std::pair<std::string, LatencyReport>>& rows);

}  // namespace distillforge::bench
