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

#include "distillforge/encoder.hpp"

#include <cmath>

#include "distillforge/error.hpp"

namespace distillforge::data {

FeatureEncoder FeatureEncoder::fit(const Dataset& ds) {
  FeatureEncoder enc;
  for (std::size_t c = 0; c < ds.feature_count(); ++c) {
    Column col;
    if (ds.feature_kinds[c] == ColumnKind::categorical) {
      col.categorical = true;
      int max_code = -1;
      for (std::size_t r = 0; r < ds.rows(); ++r) {
        const double v = ds.features(r, c);
        if (!std::isnan(v)) max_code = std::max(max_code, static_cast<int>(v));
      }
      col.levels = std::max(max_code + 1, static_cast<int>(ds.category_levels[c].size()));
    } else {
      double sum = 0.0;
      std::size_t count = 0;
      for (std::size_t r = 0; r < ds.rows(); ++r) {
        const double v = ds.features(r, c);
        if (std::isnan(v)) continue;
        sum += v;
        ++count;
      }
      col.mean = count ? sum / static_cast<double>(count) : 0.0;
      double ss = 0.0;
      for (std::size_t r = 0; r < ds.rows(); ++r) {
        const double v = ds.features(r, c);
        if (!std::isnan(v)) ss += (v - col.mean) * (v - col.mean);
      }
      const double sd = count ? std::sqrt(ss / static_cast<double>(count)) : 0.0;
      col.scale = sd > 1e-12 ? sd : 1.0;
    }
    enc.columns.push_back(col);
  }
  return enc;
}

std::size_t FeatureEncoder::output_width() const {
  std::size_t w = 0;
  for (const auto& c : columns) w += c.categorical ? static_cast<std::size_t>(c.levels) : 1;
  return w;
}

Matrix FeatureEncoder::transform(const Matrix& raw) const {
  if (raw.cols() != columns.size())
    throw ValidationError("encoder: expected " + std::to_string(columns.size()) + " features, got " +
                          std::to_string(raw.cols()));
  Matrix out(raw.rows(), output_width());
  for (std::size_t r = 0; r < raw.rows(); ++r) {
    std::size_t pos = 0;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const auto& col = columns[c];
      const double v = raw(r, c);
      if (col.categorical) {
        if (!std::isnan(v) && v >= 0 && v < col.levels) out(r, pos + static_cast<std::size_t>(v)) = 1.0;
        pos += static_cast<std::size_t>(col.levels);
      } else {
        out(r, pos) = std::isnan(v) ? 0.0 : (v - col.mean) / col.scale;
        ++pos;
      }
    }
  }
  return out;
}

}  // namespace distillforge::data
