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

#include <doctest.h>

#include "distillforge/wilcoxon.hpp"
#include "oracles.hpp"

using namespace distillforge;
using namespace distillforge::stats;

TEST_CASE("n = 5 example matches the enumerated distribution") {
  const std::vector<double> d{1, 2, 3, -1, -2};
  const auto r = wilcoxon_signed_rank(d);
  REQUIRE(r.p_value);
  CHECK(r.exact);
  CHECK(r.n_pairs == 5);
  CHECK(r.w_plus == 10.0);
  CHECK(*r.p_value == doctest::Approx(oracle::wilcoxon_enumerated(d)).epsilon(1e-12));
}

TEST_CASE("all positive deltas at n = 5 give the minimum two-sided p") {
  const std::vector<double> d{0.1, 0.2, 0.3, 0.4, 0.5};
  CHECK(*wilcoxon_signed_rank(d).p_value == doctest::Approx(2.0 / 32.0));
}

TEST_CASE("fewer than five pairs is not applicable") {
  const std::vector<double> d{1, 2, 3, 4};
  const auto r = wilcoxon_signed_rank(d);
  CHECK_FALSE(r.p_value);
  CHECK(r.n_pairs == 4);
}

TEST_CASE("all-zero deltas give p = 1") {
  const std::vector<double> d(6, 0.0);
  const auto r = wilcoxon_signed_rank(d);
  REQUIRE(r.p_value);
  CHECK(*r.p_value == 1.0);
  CHECK(r.n_nonzero == 0);
}

TEST_CASE("property: exact p matches enumeration with ties and zeros") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 5 + rng.below(10);
    std::vector<double> d(n);
    for (auto& v : d) v = trial % 2 ? static_cast<double>(static_cast<int>(rng.below(7)) - 3) : rng.normal();
    const auto r = wilcoxon_signed_rank(d);
    REQUIRE(r.p_value);
    CHECK(*r.p_value == doctest::Approx(oracle::wilcoxon_enumerated(d)).epsilon(1e-9));
  }
}

TEST_CASE("normal approximation above the exact limit") {
  Rng rng(6);
  std::vector<double> d(40);
  for (auto& v : d) v = rng.normal() + 0.5;
  const auto r = wilcoxon_signed_rank(d);
  REQUIRE(r.p_value);
  CHECK_FALSE(r.exact);
  CHECK(*r.p_value > 0.0);
  CHECK(*r.p_value < 0.05);

  std::vector<double> sym;
  for (int i = 1; i <= 15; ++i) {
    sym.push_back(i);
    sym.push_back(-i);
  }
  CHECK(*wilcoxon_signed_rank(sym).p_value == doctest::Approx(1.0));
}

TEST_CASE("p values lie in (0, 1] and are sign symmetric") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> d(5 + rng.below(30)), neg;
    for (auto& v : d) v = rng.normal();
    for (double v : d) neg.push_back(-v);
    const double p = *wilcoxon_signed_rank(d).p_value;
    CHECK(p > 0.0);
    CHECK(p <= 1.0);
    CHECK(*wilcoxon_signed_rank(neg).p_value == doctest::Approx(p).epsilon(1e-12));
  }
}
