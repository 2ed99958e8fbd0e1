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

#include <cmath>

#include "distillforge/error.hpp"
#include "distillforge/logreg.hpp"
#include "distillforge/metrics.hpp"
#include "oracles.hpp"

using namespace distillforge;
using namespace distillforge::baselines;

namespace {

data::Dataset synth(std::size_t n, std::size_t d, std::uint64_t seed, int classes = 2) {
  data::SynthConfig cfg;
  cfg.n = n;
  cfg.d = d;
  cfg.seed = seed;
  cfg.classes = classes;
  cfg.label_noise = 0.1;
  return data::synth_generate(cfg);
}

}  // namespace

TEST_CASE("separable 1-D data: finite weights and train AUC 1") {
  Matrix x(40, 1);
  std::vector<int> y(40);
  for (std::size_t i = 0; i < 40; ++i) {
    x(i, 0) = static_cast<double>(i);
    y[i] = i >= 20 ? 1 : 0;
  }
  const auto ds = oracle::make_dataset(x, y, 2);
  const auto model = fit_logreg(ds);
  CHECK(model.converged);
  for (double w : model.weights.data()) CHECK(std::isfinite(w));
  CHECK(metrics::auc(model.predict_proba(ds.features).column(1), ds.labels) == 1.0);
}

TEST_CASE("huge l2 shrinks weights and predicts the prior") {
  const auto ds = synth(300, 4, 1);
  LogRegConfig cfg;
  cfg.l2 = 1e6;
  const auto model = fit_logreg(ds, cfg);
  for (double w : model.weights.data()) CHECK(std::fabs(w) < 1e-3);
  double prior = 0.0;
  for (int v : ds.labels) prior += v;
  prior /= static_cast<double>(ds.rows());
  const auto p = model.predict_proba(ds.features);
  for (std::size_t i = 0; i < p.rows(); ++i) CHECK(p(i, 1) == doctest::Approx(prior).epsilon(1e-2));
}

TEST_CASE("gradient at the optimum is within tolerance") {
  for (int classes : {2, 3}) {
    const auto ds = synth(300, 5, 2, classes);
    const auto model = fit_logreg(ds);
    CHECK(model.converged);
    CHECK(model.gradient_norm <= 1e-6);
  }
}

TEST_CASE("final objective is no worse than the zero model") {
  for (int classes : {2, 3}) {
    const auto ds = synth(250, 4, 3, classes);
    const auto model = fit_logreg(ds);
    const auto encoded = model.encoder.transform(ds.features);
    auto zero = model;
    for (auto& w : zero.weights.data()) w = 0.0;
    for (auto& b : zero.bias) b = 0.0;
    CHECK(logreg_objective(model, encoded, ds.labels) <= logreg_objective(zero, encoded, ds.labels));
  }
}

TEST_CASE("zero weights give uniform probabilities") {
  const auto ds = synth(100, 3, 4, 3);
  auto model = fit_logreg(ds);
  for (auto& w : model.weights.data()) w = 0.0;
  for (auto& b : model.bias) b = 0.0;
  const auto p = model.predict_proba(ds.features);
  for (double v : p.data()) CHECK(v == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("probabilities on the simplex and monotone in score") {
  for (int classes : {2, 3}) {
    const auto ds = synth(200, 4, 5, classes);
    const auto model = fit_logreg(ds);
    const auto p = model.predict_proba(ds.features);
    const auto s = model.scores(ds.features);
    for (std::size_t i = 0; i < p.rows(); ++i) {
      double sum = 0.0;
      for (double v : p.row(i)) sum += v;
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
    if (classes == 2) {
      for (std::size_t i = 1; i < p.rows(); ++i)
        if (s(i, 0) > s(i - 1, 0)) CHECK(p(i, 1) >= p(i - 1, 1));
    }
  }
}

TEST_CASE("deterministic fit and bit-exact round trip") {
  const auto ds = synth(200, 4, 6, 3);
  const auto model = fit_logreg(ds);
  CHECK(fit_logreg(ds).serialize() == model.serialize());
  const auto back = LogRegModel::deserialize(model.serialize());
  CHECK(back.predict_proba(ds.features) == model.predict_proba(ds.features));
  CHECK(back.serialize() == model.serialize());
  CHECK_THROWS_AS(LogRegModel::deserialize("not json"), ValidationError);
  CHECK_THROWS_AS(model.predict_proba(Matrix(1, 2)), ValidationError);
}

TEST_CASE("config validation and json") {
  LogRegConfig cfg;
  cfg.l2 = 0.5;
  CHECK(LogRegConfig::from_json(cfg.to_json()) == cfg);
  cfg.l2 = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}
