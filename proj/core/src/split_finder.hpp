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
#include <span>
#include <vector>

#include "distillforge/gbdt.hpp"
#include "distillforge/matrix.hpp"

namespace distillforge::gbdt::detail {

// Sorted row orders for each feature, NaN rows kept separately.
struct ColumnIndex {
  std::vector<std::vector<std::uint32_t>> sorted;   // [feature] -> row positions by value
  std::vector<std::vector<std::uint32_t>> missing;  // [feature] -> NaN row positions

  static ColumnIndex build(const Matrix& x);
};

// Grows one regression tree level by level on (gradient, hessian) pairs.
// Every active node is scanned in a single pass per feature.
Tree grow_tree(const Matrix& x, const ColumnIndex& index, std::span<const double> grads,
               std::span<const double> hessians, const GbdtConfig& cfg,
               std::vector<std::int32_t>& leaf_of);

// The gain must beat this to count as an improvement.
double min_gain(double parent_score);

}  // namespace distillforge::gbdt::detail
