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
#include <vector>

#include "distillforge/dataset.hpp"
#include "distillforge/matrix.hpp"

namespace distillforge::data {

// Dense input encoding for the linear and neural students: numeric columns
// are z-scored with training statistics, categorical codes are one-hot
// expanded. Missing numeric cells map to 0 (the training mean); missing or
// unseen categories map to an all-zero block.
struct FeatureEncoder {
  struct Column {
    bool categorical = false;
    double mean = 0.0;
    double scale = 1.0;
    int levels = 0;
    friend bool operator==(const Column&, const Column&) = default;
  };

  std::vector<Column> columns;

  static FeatureEncoder fit(const Dataset& ds);

  std::size_t input_width() const noexcept { return columns.size(); }
  std::size_t output_width() const;
  Matrix transform(const Matrix& raw) const;

  friend bool operator==(const FeatureEncoder&, const FeatureEncoder&) = default;
};

}  // namespace distillforge::data
