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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "distillforge/error.hpp"
#include "distillforge/metrics.hpp"
#include "oracles.hpp"

using namespace distillforge;
using namespace distillforge::metrics;

namespace {

Matrix binary_probs(const std::vector<double>& p1) {
  Matrix m(p1.size(), 2);
  for (std::size_t i = 0; i < p1.size(); ++i) {
    m(i, 0) = 1.0 - p1[i];
    m(i, 1) = p1[i];
  }
  return m;
}

// Logits with labels drawn from their own softmax, then scaled by `scale`.
std::pair<Matrix, std::vector<int>> calibrated_logits(std::size_t n, double scale, std::uint64_t seed) {
  Rng rng(seed);
  Matrix z(n, 2);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = 2.0 * rng.normal();
    y[i] = rng.uniform() < 1.0 / (1.0 + std::exp(-s)) ? 1 : 0;
    z(i, 0) = 0.0;
    z(i, 1) = scale * s;
  }
  return {z, y};
}

}  // namespace

TEST_CASE("auc examples") {
  const std::vector<double> s{0.1, 0.4, 0.35, 0.8};
  const std::vector<int> y{0, 0, 1, 1};
  CHECK(auc(s, y) == 0.75);
  CHECK(auc(std::vector<double>{0.1, 0.2, 0.9, 0.95}, y) == 1.0);
  CHECK(auc(std::vector<double>(4, 0.3), y) == 0.5);
  CHECK_THROWS_AS(auc(s, std::vector<int>{1, 1, 1, 1}), ValidationError);
}

TEST_CASE("property: auc equals the pairwise oracle") {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(29);
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = trial % 2 ? static_cast<double>(rng.below(5)) : rng.normal();
      y[i] = static_cast<int>(rng.below(2));
    }
    y[0] = 0;
    y[1] = 1;
    CHECK(auc(s, y) == oracle::pairwise_auc(s, y));
  }
}

TEST_CASE("property: auc invariances") {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 10 + rng.below(40);
    std::vector<double> s(n), t(n), neg(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = rng.normal();
      t[i] = std::exp(3.0 * s[i]) + 7.0;
      neg[i] = -s[i];
      y[i] = static_cast<int>(rng.below(2));
    }
    y[0] = 0;
    y[1] = 1;
    CHECK(auc(s, y) == auc(t, y));
    CHECK(auc(s, y) + auc(neg, y) == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("macro auc") {
  Rng rng(3);
  const std::vector<int> y{0, 1, 0, 1, 1, 0};
  const auto p = binary_probs({0.2, 0.7, 0.4, 0.6, 0.3, 0.1});
  CHECK(macro_auc(p, y) == auc(p.column(1), y));

  Matrix perfect(9, 3, 0.0);
  std::vector<int> y3(9);
  for (std::size_t i = 0; i < 9; ++i) {
    y3[i] = static_cast<int>(i % 3);
    perfect(i, i % 3) = 1.0;
  }
  CHECK(macro_auc(perfect, y3) == 1.0);

  const std::size_t n = 3000;
  std::vector<int> yb(n);
  for (std::size_t i = 0; i < n; ++i) yb[i] = static_cast<int>(i % 3);
  const auto random = oracle::random_probs(n, 3, rng);
  CHECK(std::fabs(macro_auc(random, yb) - 0.5) <= 0.03);
}

TEST_CASE("retention") {
  CHECK(retention(0.862, 0.870) == doctest::Approx(99.08).epsilon(1e-4));
  CHECK(retention(0.8, 0.8) == 100.0);
  CHECK(retention(0.749, 0.985) == doctest::Approx(76.04).epsilon(1e-4));
  CHECK_THROWS_AS(retention(0.8, 0.0), ValidationError);
}

TEST_CASE("ece hand cases") {
  const std::vector<int> ones(10, 1);
  CHECK(ece(binary_probs(std::vector<double>(10, 1.0)), ones) == 0.0);
  std::vector<int> half(10, 0);
  for (std::size_t i = 0; i < 5; ++i) half[i] = 1;
  CHECK(ece(binary_probs(std::vector<double>(10, 0.9)), half) == doctest::Approx(0.4).epsilon(1e-12));
  // Bin with confidence 0.75 and accuracy 0.75: zero gap.
  std::vector<int> y{1, 1, 1, 0};
  CHECK(ece(binary_probs(std::vector<double>(4, 0.75)), y) <= 1e-12);
}

TEST_CASE("brier hand cases") {
  const std::vector<int> y{0, 1, 1, 0};
  CHECK(brier_binary(binary_probs(std::vector<double>(4, 0.5)), y) == 0.25);
  CHECK(brier(binary_probs({0.0, 1.0, 1.0, 0.0}), y) == 0.0);
  CHECK(brier_binary(binary_probs({0.2}), std::vector<int>{0}) == doctest::Approx(0.04));
  CHECK(brier(binary_probs({0.2}), std::vector<int>{0}) == doctest::Approx(0.08));
}

TEST_CASE("property: ece and brier are permutation invariant") {
  Rng rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 20 + rng.below(50);
    const auto p = oracle::random_probs(n, 3, rng);
    std::vector<int> y(n);
    for (auto& v : y) v = static_cast<int>(rng.below(3));
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(std::span<std::size_t>(perm));
    Matrix q(n, 3);
    std::vector<int> z(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < 3; ++c) q(i, c) = p(perm[i], c);
      z[i] = y[perm[i]];
    }
    CHECK(ece(q, z) == doctest::Approx(ece(p, y)).epsilon(1e-12));
    CHECK(brier(q, z) == doctest::Approx(brier(p, y)).epsilon(1e-12));
  }
}

TEST_CASE("temperature scaling recovers the scale") {
  auto [z1, y1] = calibrated_logits(20000, 1.0, 5);
  CHECK(fit_temperature(z1, y1) == doctest::Approx(1.0).epsilon(0.1));
  auto [z3, y3] = calibrated_logits(20000, 3.0, 6);
  CHECK(fit_temperature(z3, y3) == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("property: fitted temperature never increases CE") {
  Rng rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 5 + rng.below(100);
    Matrix z(n, 3);
    std::vector<int> y(n);
    const double scale = rng.uniform(0.01, 10.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < 3; ++c) z(i, c) = scale * rng.normal();
      y[i] = static_cast<int>(rng.below(3));
    }
    const double t = fit_temperature(z, y);
    CHECK(t > 0.0);
    CHECK(cross_entropy(z, y, t) <= cross_entropy(z, y, 1.0));
  }
}

TEST_CASE("dp diff") {
  const std::vector<int> g{0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
  CHECK(dp_diff(std::vector<int>{1, 0, 1, 0, 1, 1, 0, 1, 0, 1}, g) == 0.0);
  CHECK(dp_diff(std::vector<int>{1, 1, 1, 0, 0, 1, 1, 0, 0, 0}, g) == doctest::Approx(0.2));
  CHECK(dp_diff(std::vector<int>{1, 0, 1}, std::vector<int>{4, 4, 4}) == 0.0);
}

TEST_CASE("eo diff") {
  std::vector<int> d, y, g;
  for (int i = 0; i < 10; ++i) {
    y.push_back(1);
    g.push_back(0);
    d.push_back(i < 9 ? 1 : 0);
  }
  for (int i = 0; i < 10; ++i) {
    y.push_back(1);
    g.push_back(1);
    d.push_back(i < 7 ? 1 : 0);
  }
  CHECK(eo_diff(d, y, g).value == doctest::Approx(0.2));
  // A third group with only negatives is excluded.
  for (int i = 0; i < 4; ++i) {
    y.push_back(0);
    g.push_back(2);
    d.push_back(1);
  }
  const auto r = eo_diff(d, y, g);
  CHECK(r.value == doctest::Approx(0.2));
  CHECK(r.excluded_groups == std::vector<int>{2});
  CHECK_THROWS_AS(eo_diff(std::vector<int>{1, 0}, std::vector<int>{0, 0}, std::vector<int>{0, 1}), ValidationError);
}

TEST_CASE("property: fairness gaps invariant under group relabeling") {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 20 + rng.below(40);
    std::vector<int> d(n), y(n), g(n), h(n);
    for (std::size_t i = 0; i < n; ++i) {
      d[i] = static_cast<int>(rng.below(2));
      y[i] = static_cast<int>(rng.below(2));
      g[i] = static_cast<int>(rng.below(3));
      h[i] = 10 - 3 * g[i];
    }
    y[0] = y[1] = y[2] = 1;
    g[0] = 0;
    g[1] = 1;
    g[2] = 2;
    h[0] = 10;
    h[1] = 7;
    h[2] = 4;
    const double a = dp_diff(d, g);
    CHECK(a == dp_diff(d, h));
    CHECK(a >= 0.0);
    CHECK(a <= 1.0);
    for (auto v : {EoVariant::opportunity, EoVariant::odds}) {
      const double e = eo_diff(d, y, g, v).value;
      CHECK(e == eo_diff(d, y, h, v).value);
      CHECK(e >= 0.0);
      CHECK(e <= 1.0);
    }
  }
}

TEST_CASE("evaluate: perfect classifier and json round trip") {
  const std::vector<int> y{0, 1, 0, 1, 0, 1, 0, 1};
  Matrix z(8, 2, 0.0);
  for (std::size_t i = 0; i < 8; ++i) z(i, 1) = y[i] ? 40.0 : -40.0;
  EvalInput in;
  in.test_logits = z;
  in.test_labels = y;
  in.sensitive["group"] = {0, 0, 0, 0, 1, 1, 1, 1};
  in.calib_logits = z;
  in.calib_labels = y;
  auto report = evaluate(in);
  CHECK(report.auc == 1.0);
  CHECK(report.ece < 1e-12);
  CHECK(report.brier < 1e-12);
  CHECK_FALSE(report.retention_pct);
  CHECK(report.dp_diff.at("group") == 0.0);
  CHECK(report.eo_diff.at("group") == 0.0);
  CHECK(report.n_test == 8);
  CHECK(EvalReport::from_json(report.to_json()) == report);

  in.teacher_auc = 0.5;
  report = evaluate(in);
  REQUIRE(report.retention_pct);
  CHECK(*report.retention_pct == 200.0);
  CHECK(EvalReport::from_json(report.to_json()) == report);
}

TEST_CASE("evaluate: calibration improves an overconfident model") {
  auto [zc, yc] = calibrated_logits(3000, 3.0, 9);
  auto [zt, yt] = calibrated_logits(3000, 3.0, 10);
  EvalInput in;
  in.test_logits = zt;
  in.test_labels = yt;
  in.calib_logits = zc;
  in.calib_labels = yc;
  const auto report = evaluate(in);
  CHECK(report.fitted_temperature == doctest::Approx(3.0).epsilon(0.1));
  CHECK(report.ece_ts < report.ece);
  CHECK(report.brier_ts < report.brier);
}
