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
#include "distillforge/metrics.hpp"
#include "distillforge/mlp.hpp"
#include "oracles.hpp"

using namespace distillforge;
using namespace distillforge::mlp;

namespace {

data::Dataset synth(std::size_t n, std::size_t d, std::uint64_t seed, int classes = 2) {
  data::SynthConfig cfg;
  cfg.n = n;
  cfg.d = d;
  cfg.seed = seed;
  cfg.classes = classes;
  return data::synth_generate(cfg);
}

TrainSchedule quick(int epochs = 10) {
  TrainSchedule s;
  s.epochs = epochs;
  s.peak_lr = 0.01;
  return s;
}

MlpParams random_params(std::size_t in, std::size_t classes, Rng& rng) {
  auto p = MlpParams::zeros(in, embedding_width(in), 6, classes);
  for (auto& v : p.values) v = 0.4 * rng.normal();
  return p;
}

Matrix random_rows(std::size_t n, std::size_t d, Rng& rng) {
  Matrix x(n, d);
  for (auto& v : x.data()) v = rng.normal();
  return x;
}

}  // namespace

TEST_CASE("embedding width is min(8d, 128)") {
  CHECK(embedding_width(10) == 80);
  CHECK(embedding_width(20) == 128);
  CHECK(embedding_width(1) == 8);
  CHECK(embedding_width(16) == 128);
}

TEST_CASE("hidden width scales with rows") {
  CHECK(hidden_width_for(100) == 32);
  CHECK(hidden_width_for(1000) == 125);
  CHECK(hidden_width_for(100000) == 256);
}

TEST_CASE("restart dropout sequence and cap") {
  double d = 0.1;
  const double expected[] = {0.15, 0.225, 0.3375};
  for (int a = 1; a <= 3; ++a) {
    const auto plan = restart_policy(d, a, 100);
    CHECK(plan.dropout == doctest::Approx(expected[a - 1]).epsilon(1e-12));
    CHECK(plan.seed == 100u + static_cast<std::uint64_t>(a));
    d = plan.dropout;
  }
  for (double x : {0.34, 0.4, 0.5}) CHECK(restart_policy(x, 1, 0).dropout <= 0.5);
  CHECK(restart_policy(0.4, 1, 0).dropout == 0.5);
}

TEST_CASE("collapse detector") {
  Matrix degenerate(20, 2);
  for (std::size_t i = 0; i < 20; ++i) {
    degenerate(i, 0) = 0.9999;
    degenerate(i, 1) = 0.0001;
  }
  CHECK(collapse_check(degenerate) == Health::collapsed);
  CHECK(collapse_check(Matrix(20, 2, 0.5)) == Health::healthy);
  Matrix mixed(20, 2);
  for (std::size_t i = 0; i < 20; ++i) {
    mixed(i, i % 2) = 0.9999;
    mixed(i, 1 - i % 2) = 0.0001;
  }
  CHECK(collapse_check(mixed) == Health::healthy);
  CHECK(collapse_check(Matrix(20, 2, 0.5), 0.01, 0.99, false) == Health::collapsed);
  CHECK_THROWS_AS(collapse_check(Matrix(5, 2, 0.5)), ValidationError);
}

TEST_CASE("learning rate schedule") {
  TrainSchedule s;
  s.peak_lr = 0.01;
  s.warmup_fraction = 0.1;
  const std::size_t total = 1000;
  CHECK(learning_rate_at(s, 0, total) == 0.0);
  CHECK(learning_rate_at(s, 100, total) == doctest::Approx(0.01));
  CHECK(learning_rate_at(s, total - 1, total) <= 1e-3 * s.peak_lr);
  for (std::size_t t = 1; t < 100; ++t) CHECK(learning_rate_at(s, t, total) > learning_rate_at(s, t - 1, total));
  for (std::size_t t = 101; t < total; ++t) CHECK(learning_rate_at(s, t, total) <= learning_rate_at(s, t - 1, total));
}

TEST_CASE("zero-weight network gives uniform probabilities") {
  auto p = MlpParams::zeros(4, embedding_width(4), 8, 3);
  const auto z = forward_logits(p, Matrix(5, 4, 1.0));
  for (double v : z.data()) CHECK(v == 0.0);
}

TEST_CASE("property: analytic gradient matches finite differences") {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t in = 2 + rng.below(4), classes = 2 + rng.below(2), n = 3 + rng.below(4);
    const auto params = random_params(in, classes, rng);
    const auto x = random_rows(n, in, rng);
    std::vector<int> y(n);
    for (auto& v : y) v = static_cast<int>(rng.below(classes));
    distill::LossConfig cfg;
    cfg.alpha = rng.uniform(0.1, 0.9);
    const auto targets = distill::build_targets(oracle::random_probs(n, classes, rng), y, cfg);
    const double eps = 0.05;
    const auto grad = loss_gradient(params, x, targets, cfg, eps);
    auto f = [&](const std::vector<double>& v) {
      auto p = params;
      p.values = v;
      return distill::mixed_loss(forward_logits(p, x), targets, cfg, eps);
    };
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < params.values.size(); k += 1 + k % 3) {
      const double fd = oracle::central_difference(f, params.values, k, 1e-5);
      num += (fd - grad[k]) * (fd - grad[k]);
      den += fd * fd + grad[k] * grad[k];
    }
    CHECK(std::sqrt(num / std::max(den, 1e-300)) < 1e-4);
  }
}

TEST_CASE("smoothing gives the expected hard target") {
  // Binary, y = 1, eps = 0.05: gradient of CE at zero logits is softmax - (0.025, 0.975).
  distill::LossConfig cfg;
  cfg.alpha = 0.0;
  const std::vector<int> y{1};
  const auto targets = distill::hard_targets(y, 2);
  const auto g = distill::mixed_gradient_mlp(Matrix(1, 2, 0.0), targets, cfg, 0.05);
  CHECK(g(0, 0) == doctest::Approx(0.5 - 0.025));
  CHECK(g(0, 1) == doctest::Approx(0.5 - 0.975));
}

TEST_CASE("training learns, is deterministic and round-trips") {
  const auto ds = synth(400, 6, 3);
  const auto model = fit_mlp_hard(ds, quick(15), 7);
  CHECK(model.params.embed == 48);
  CHECK(model.params.all_finite());
  CHECK(model.swa);
  CHECK_FALSE(model.collapsed);
  const auto p = model.predict_proba(ds.features);
  CHECK(metrics::auc(p.column(1), ds.labels) > 0.9);
  for (std::size_t i = 0; i < p.rows(); ++i) CHECK(p(i, 0) + p(i, 1) == doctest::Approx(1.0).epsilon(1e-9));
  const auto again = fit_mlp_hard(ds, quick(15), 7);
  CHECK(again.serialize() == model.serialize());
  const auto back = MlpModel::deserialize(model.serialize());
  CHECK(back.predict_proba(ds.features) == p);
  CHECK(back.serialize() == model.serialize());
  CHECK_THROWS_AS(model.predict_proba(Matrix(2, 5)), ValidationError);
  CHECK_THROWS_AS(MlpModel::deserialize("{\"format\":\"distillforge-gbdt\"}"), ValidationError);
}

TEST_CASE("SWA equals the mean of its snapshots") {
  const auto ds = synth(200, 4, 4);
  auto sched = quick(20);
  std::vector<MlpParams> snaps;
  std::vector<int> epochs;
  FitHooks hooks;
  hooks.on_swa_snapshot = [&](int e, const MlpParams& p) {
    epochs.push_back(e);
    snaps.push_back(p);
  };
  const auto model = fit_mlp_hard(ds, sched, 1, hooks);
  REQUIRE(snaps.size() == 4);
  CHECK(epochs.front() == 17);
  CHECK(epochs.back() == 20);
  for (std::size_t k = 0; k < model.params.values.size(); ++k) {
    double mean = 0.0;
    for (const auto& s : snaps) mean += s.values[k];
    mean /= static_cast<double>(snaps.size());
    CHECK(model.params.values[k] == doctest::Approx(mean).epsilon(1e-12).scale(1e-12));
  }
}

TEST_CASE("persistent collapse stops after max_restarts") {
  const auto ds = synth(200, 4, 5);
  auto sched = quick(6);
  std::vector<double> dropouts{sched.dropout};
  FitHooks hooks;
  hooks.on_restart = [&](int, double d) { dropouts.push_back(d); };
  hooks.force_collapse = [](int, int epoch) { return epoch == 3; };
  const auto model = fit_mlp_hard(ds, sched, 2, hooks);
  CHECK(model.collapsed);
  CHECK(model.restarts == sched.max_restarts);
  CHECK(dropouts.size() == static_cast<std::size_t>(sched.max_restarts) + 1);
  for (std::size_t i = 1; i < dropouts.size(); ++i) CHECK(dropouts[i] >= dropouts[i - 1]);
  CHECK(model.params.all_finite());
  CHECK_FALSE(model.swa);
}

TEST_CASE("a single forced collapse recovers on restart") {
  const auto ds = synth(200, 4, 6);
  FitHooks hooks;
  int restarts = 0;
  hooks.on_restart = [&](int, double) { ++restarts; };
  hooks.force_collapse = [](int attempt, int epoch) { return attempt == 0 && epoch == 2; };
  const auto model = fit_mlp_hard(ds, quick(6), 3, hooks);
  CHECK(restarts == 1);
  CHECK(model.restarts == 1);
  CHECK_FALSE(model.collapsed);
  CHECK(model.dropout == doctest::Approx(0.15));
}

TEST_CASE("multiclass output on the simplex") {
  const auto ds = synth(300, 5, 7, 3);
  distill::LossConfig cfg;
  Rng rng(3);
  const auto targets = distill::build_targets(oracle::random_probs(ds.rows(), 3, rng), ds.labels, cfg);
  const auto model = fit_mlp(ds, targets, quick(4), cfg, 1);
  const auto p = model.predict_proba(ds.features);
  CHECK(p.cols() == 3);
  for (std::size_t i = 0; i < p.rows(); ++i) CHECK(p(i, 0) + p(i, 1) + p(i, 2) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("schedule json round trip and validation") {
  auto s = quick(33);
  s.augment_sigma = 0.0;
  CHECK(TrainSchedule::from_json(s.to_json()) == s);
  s.batch_size = 0;
  CHECK_THROWS_AS(s.validate(), ValidationError);
}
