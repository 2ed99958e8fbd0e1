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

#include "distillforge/wilcoxon.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace distillforge::stats {

WilcoxonResult wilcoxon_signed_rank(std::span<const double> deltas) {
  WilcoxonResult r;
  r.n_pairs = deltas.size();
  std::vector<double> nz;
  for (double d : deltas)
    if (d != 0.0) nz.push_back(d);
  r.n_nonzero = nz.size();
  if (r.n_pairs < kWilcoxonMinPairs) return r;
  if (nz.empty()) {
    r.p_value = 1.0;
    r.exact = true;
    return r;
  }

  const std::size_t n = nz.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return std::fabs(nz[a]) < std::fabs(nz[b]); });
  // Doubled midranks stay integral.
  std::vector<std::int64_t> rank2(n);
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && std::fabs(nz[order[j]]) == std::fabs(nz[order[i]])) ++j;
    const auto doubled = static_cast<std::int64_t>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) rank2[order[k]] = doubled;
    const auto t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  std::int64_t w2 = 0, total2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total2 += rank2[i];
    if (nz[i] > 0.0) w2 += rank2[i];
  }
  r.w_plus = static_cast<double>(w2) / 2.0;

  if (n <= kWilcoxonExactMax) {
    // counts[s] = number of sign assignments with doubled positive rank sum s.
    std::vector<double> counts(static_cast<std::size_t>(total2) + 1, 0.0);
    counts[0] = 1.0;
    std::int64_t reach = 0;
    for (std::size_t i = 0; i < n; ++i) {
      reach += rank2[i];
      for (std::int64_t s = reach; s >= rank2[i]; --s)
        counts[static_cast<std::size_t>(s)] += counts[static_cast<std::size_t>(s - rank2[i])];
    }
    const std::int64_t observed = std::llabs(2 * w2 - total2);
    double extreme = 0.0;
    for (std::int64_t s = 0; s <= total2; ++s)
      if (std::llabs(2 * s - total2) >= observed) extreme += counts[static_cast<std::size_t>(s)];
    r.p_value = std::min(1.0, extreme / std::ldexp(1.0, static_cast<int>(n)));
    r.exact = true;
    return r;
  }

  const double nn = static_cast<double>(n);
  const double mean = nn * (nn + 1.0) / 4.0;
  const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
  if (var <= 0.0) {
    r.p_value = 1.0;
    return r;
  }
  const double z = std::fabs(r.w_plus - mean) / std::sqrt(var);
  r.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return r;
}

}  // namespace distillforge::stats
