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

#include <vector>

#include "distillforge/gbdt.hpp"
#include "distillforge/random.hpp"

namespace df = distillforge;

namespace {

void BM_SplitFinding(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  df::Rng rng(3);
  std::vector<double> x(n), g(n), h(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = rng.normal();
    g[i] = rng.normal();
    h[i] = rng.uniform(0.1, 1.0);
  }
  const df::gbdt::GbdtConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(df::gbdt::split_finding(x, g, h, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_SplitFinding)->Arg(1000)->Arg(10000);

void BM_GbdtFit(benchmark::State& state) {
  df::data::SynthConfig s;
  s.n = static_cast<std::size_t>(state.range(0));
  s.d = 20;
  const auto ds = df::data::synth_generate(s);
  df::gbdt::GbdtConfig cfg;
  cfg.n_trees = 50;
  for (auto _ : state) benchmark::DoNotOptimize(df::gbdt::fit_hard(ds, cfg));
}
BENCHMARK(BM_GbdtFit)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
