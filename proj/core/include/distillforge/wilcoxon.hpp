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
#include <optional>
#include <span>

namespace distillforge::stats {

struct WilcoxonResult {
  std::size_t n_pairs = 0;    // before dropping zero differences
  std::size_t n_nonzero = 0;
  double w_plus = 0.0;        // sum of ranks of positive differences
  std::optional<double> p_value;  // empty when fewer than 5 pairs
  bool exact = false;
};

inline constexpr std::size_t kWilcoxonMinPairs = 5;
inline constexpr std::size_t kWilcoxonExactMax = 20;

// Two-sided signed-rank test on paired differences. Zeros are dropped and
// tied magnitudes get midranks. Exact null distribution up to 20 nonzero
// differences, normal approximation beyond.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> deltas);

}  // namespace distillforge::stats
