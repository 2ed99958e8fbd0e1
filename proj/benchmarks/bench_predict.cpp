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

#include <benchmark/benchmark.h>

#include "distillforge/pipeline.hpp"

namespace df = distillforge;

namespace {

struct Fixture {
  df::data::Dataset ds;
  df::distill::DistillTargets targets;
  df::distill::LossConfig loss;

  Fixture() {
    df::data::SynthConfig s;
    s.n = 1000;
    s.d = 20;
    s.label_noise = 0.1;
    ds = df::data::synth_generate(s);
    const auto folds = df::data::stratified_kfold(ds, 5, 1);
    const auto soft = df::teacher::oof_label(ds, folds, df::teacher::TeacherSpec::parse("bagged:trees=20,depth=6"));
    targets = df::distill::build_targets(soft, ds.labels, loss);
  }

  static const Fixture& get() {
    static const Fixture f;
    return f;
  }
};

void BM_GbdtPredict(benchmark::State& state) {
  const auto& f = Fixture::get();
  df::gbdt::GbdtConfig cfg;
  cfg.n_trees = static_cast<int>(state.range(0));
  cfg.val_fraction = 0.0;
  const auto model = df::gbdt::fit_distilled(f.ds, f.targets, f.loss, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(model.predict_proba(f.ds.features));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.ds.rows()));
}
BENCHMARK(BM_GbdtPredict)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_MlpPredict(benchmark::State& state) {
  const auto& f = Fixture::get();
  df::mlp::TrainSchedule sched;
  sched.epochs = 20;
  const auto model = df::mlp::fit_mlp(f.ds, f.targets, sched, f.loss, 1);
  for (auto _ : state) benchmark::DoNotOptimize(model.predict_proba(f.ds.features));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.ds.rows()));
}
BENCHMARK(BM_MlpPredict)->Unit(benchmark::kMillisecond);

void BM_LogRegPredict(benchmark::State& state) {
  const auto& f = Fixture::get();
  const auto model = df::baselines::fit_logreg(f.ds);
  for (auto _ : state) benchmark::DoNotOptimize(model.predict_proba(f.ds.features));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.ds.rows()));
}
BENCHMARK(BM_LogRegPredict)->Unit(benchmark::kMillisecond);

}  // namespace
