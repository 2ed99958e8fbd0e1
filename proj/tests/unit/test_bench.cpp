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

#include "distillforge/bench.hpp"
#include "distillforge/error.hpp"

using namespace distillforge;
using namespace distillforge::bench;

namespace {

// Roughly linear in the number of rows.
Matrix busy_predict(const Matrix& rows) {
  Matrix out(rows.rows(), 2);
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    double acc = 0.0;
    for (int rep = 0; rep < 200; ++rep)
      for (double v : rows.row(i)) acc += std::sin(v + rep);
    out(i, 0) = acc;
    out(i, 1) = -acc;
  }
  return out;
}

}  // namespace

TEST_CASE("nearest-rank quantile") {
  std::vector<double> s;
  for (int i = 1; i <= 50; ++i) s.push_back(i);
  CHECK(nearest_rank(s, 0.99) == 50.0);
  CHECK(nearest_rank(s, 0.5) == 25.0);
  std::vector<double> hundred;
  for (int i = 100; i >= 1; --i) hundred.push_back(i);
  CHECK(nearest_rank(hundred, 0.99) == 99.0);
  CHECK(nearest_rank({7.0}, 0.99) == 7.0);
}

TEST_CASE("summary invariants") {
  const std::vector<double> runs{2.0, 4.0, 3.0, 5.0, 1.0};
  const auto r = summarize(runs, 1000, 123);
  CHECK(r.mean_ms == 3.0);
  CHECK(r.min_ms == 1.0);
  CHECK(r.max_ms == 5.0);
  CHECK(r.p99_ms == 5.0);
  CHECK(r.runs == 5);
  CHECK(r.model_bytes == 123);
  CHECK(r.throughput_per_s == doctest::Approx(1000.0 / 0.003).epsilon(1e-3));
}

TEST_CASE("measure: counts, consistency and json") {
  Matrix rows(200, 10, 0.3);
  std::vector<double> run_ms;
  int calls = 0;
  const PredictFn fn = [&](const Matrix& m) {
    ++calls;
    return busy_predict(m);
  };
  const auto r = measure(fn, rows, 42, BenchConfig{5, 50}, &run_ms);
  CHECK(calls == 55);
  CHECK(run_ms.size() == 50);
  CHECK(r.runs == 50);
  CHECK(r.batch_rows == 200);
  CHECK(r.p99_ms == *std::max_element(run_ms.begin(), run_ms.end()));
  CHECK(r.p99_ms >= r.min_ms);
  CHECK(r.mean_ms >= r.min_ms);
  CHECK(r.mean_ms <= r.max_ms);
  CHECK(r.throughput_per_s == doctest::Approx(200.0 / (r.mean_ms / 1000.0)).epsilon(1e-3));
  CHECK(LatencyReport::from_json(r.to_json()).to_json() == r.to_json());
}

TEST_CASE("doubling rows roughly doubles latency") {
  Matrix small(400, 10, 0.1), big(800, 10, 0.1);
  const auto a = measure(busy_predict, small, 0, BenchConfig{3, 20});
  const auto b = measure(busy_predict, big, 0, BenchConfig{3, 20});
  const double ratio = b.mean_ms / a.mean_ms;
  CHECK(ratio >= 1.5);
  CHECK(ratio <= 3.0);
}

TEST_CASE("format table lists every row") {
  const auto r = summarize({1.0, 2.0}, 10, 5);
  const auto text = format_table({{"gbdt", r}, {"mlp", r}});
  CHECK(text.find("gbdt") != std::string::npos);
  CHECK(text.find("mlp") != std::string::npos);
}
