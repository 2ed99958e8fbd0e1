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

// Slow, independent reference implementations used as test oracles.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "distillforge/dataset.hpp"
#include "distillforge/matrix.hpp"
#include "distillforge/random.hpp"

namespace oracle {

using distillforge::Matrix;

// Fraction of (positive, negative) pairs ordered correctly; ties count half.
inline double pairwise_auc(std::span<const double> s, std::span<const int> y) {
  double good = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[i] != 1 || y[j] != 0) continue;
      pairs += 1.0;
      if (s[i] > s[j]) good += 1.0;
      else if (s[i] == s[j]) good += 0.5;
    }
  return good / pairs;
}

// Two-sided signed-rank p-value by enumerating every sign assignment.
inline double wilcoxon_enumerated(std::span<const double> deltas) {
  std::vector<double> nz;
  for (double d : deltas)
    if (d != 0.0) nz.push_back(d);
  const std::size_t n = nz.size();
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n; ++i) {
    double below = 0.0, equal = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::fabs(nz[j]) < std::fabs(nz[i])) below += 1.0;
      else if (std::fabs(nz[j]) == std::fabs(nz[i])) equal += 1.0;
    }
    rank[i] = below + (equal + 1.0) / 2.0;
  }
  double total = 0.0, observed = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += rank[i];
    if (nz[i] > 0.0) observed += rank[i];
  }
  const double centre = total / 2.0;
  std::size_t extreme = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    double w = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1U) w += rank[i];
    if (std::fabs(w - centre) >= std::fabs(observed - centre) - 1e-12) ++extreme;
  }
  return static_cast<double>(extreme) / static_cast<double>(std::uint64_t{1} << n);
}

inline double entropy_normalized(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    const double c = std::clamp(v, 1e-6, 1.0);
    h -= c * std::log(c);
  }
  return h / std::log(static_cast<double>(p.size()));
}

// Best Newton split of one column by trying every threshold between
// distinct sorted values; missing values go left.
struct Split {
  bool found = false;
  double threshold = 0.0;
  double gain = 0.0;
};

inline Split brute_force_split(std::span<const double> x, std::span<const double> g, std::span<const double> h,
                               double lambda, std::size_t min_leaf) {
  std::vector<double> values;
  for (double v : x)
    if (!std::isnan(v)) values.push_back(v);
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  double gt = 0.0, ht = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    gt += g[i];
    ht += h[i];
  }
  const double parent = gt * gt / (ht + lambda);
  Split best;
  for (std::size_t k = 0; k + 1 < values.size(); ++k) {
    double gl = 0.0, hl = 0.0;
    std::size_t nl = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (std::isnan(x[i]) || x[i] <= values[k]) {
        gl += g[i];
        hl += h[i];
        ++nl;
      }
    if (nl < min_leaf || x.size() - nl < min_leaf) continue;
    const double gr = gt - gl, hr = ht - hl;
    const double gain = gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - parent;
    if (!best.found || gain > best.gain + 1e-9 * (1.0 + std::fabs(best.gain))) {
      best = {true, values[k], gain};
    }
  }
  return best;
}

// Central finite difference of f at x along coordinate k.
inline double central_difference(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x,
                                 std::size_t k, double step = 1e-5) {
  const double x0 = x[k];
  x[k] = x0 + step;
  const double up = f(x);
  x[k] = x0 - step;
  const double down = f(x);
  return (up - down) / (2.0 * step);
}

inline distillforge::data::Dataset make_dataset(const Matrix& x, std::vector<int> labels, int classes) {
  distillforge::data::Dataset ds;
  ds.features = x;
  ds.labels = std::move(labels);
  ds.class_count = classes;
  for (std::size_t c = 0; c < x.cols(); ++c) {
    ds.feature_names.push_back("x" + std::to_string(c));
    ds.feature_kinds.push_back(distillforge::data::ColumnKind::numeric);
    ds.category_levels.emplace_back();
  }
  for (int c = 0; c < classes; ++c) ds.class_names.push_back(std::to_string(c));
  ds.missing_mask.assign(x.rows() * x.cols(), 0);
  return ds;
}

inline Matrix random_probs(std::size_t rows, std::size_t classes, distillforge::Rng& rng) {
  Matrix p(rows, classes);
  for (std::size_t i = 0; i < rows; ++i) {
    double s = 0.0;
    for (auto& v : p.row(i)) s += (v = -std::log(1.0 - rng.uniform()));
    for (auto& v : p.row(i)) v /= s;
  }
  return p;
}

}  // namespace oracle
