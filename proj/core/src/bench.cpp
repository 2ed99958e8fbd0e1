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

#include "distillforge/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <json.hpp>

#include "distillforge/error.hpp"

namespace distillforge::bench {

using nlohmann::json;

std::string LatencyReport::to_json() const {
  return json{{"mean_ms", mean_ms},
              {"p99_ms", p99_ms},
              {"min_ms", min_ms},
              {"max_ms", max_ms},
              {"throughput_per_s", throughput_per_s},
              {"runs", runs},
              {"batch_rows", batch_rows},
              {"model_bytes", model_bytes}}
             .dump(2) +
         "\n";
}

LatencyReport LatencyReport::from_json(std::string_view text) {
  try {
    const auto j = json::parse(text);
    LatencyReport r;
    r.mean_ms = j.at("mean_ms").get<double>();
    r.p99_ms = j.at("p99_ms").get<double>();
    r.min_ms = j.at("min_ms").get<double>();
    r.max_ms = j.at("max_ms").get<double>();
    r.throughput_per_s = j.at("throughput_per_s").get<double>();
    r.runs = j.at("runs").get<std::size_t>();
    r.batch_rows = j.at("batch_rows").get<std::size_t>();
    r.model_bytes = j.at("model_bytes").get<std::size_t>();
    return r;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("latency report: ") + e.what());
  }
}

double nearest_rank(std::vector<double> samples, double q) {
  if (samples.empty()) throw ValidationError("nearest_rank: no samples");
  if (!(q > 0.0 && q <= 1.0)) throw ValidationError("nearest_rank: quantile outside (0, 1]");
  std::sort(samples.begin(), samples.end());
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(samples.size()) - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, samples.size());
  return samples[rank - 1];
}

LatencyReport summarize(const std::vector<double>& run_ms, std::size_t batch_rows, std::size_t model_bytes) {
  if (run_ms.empty()) throw ValidationError("summarize: no runs");
  LatencyReport r;
  r.runs = run_ms.size();
  r.batch_rows = batch_rows;
  r.model_bytes = model_bytes;
  r.mean_ms = std::accumulate(run_ms.begin(), run_ms.end(), 0.0) / static_cast<double>(run_ms.size());
  r.p99_ms = nearest_rank(run_ms, 0.99);
  r.min_ms = *std::min_element(run_ms.begin(), run_ms.end());
  r.max_ms = *std::max_element(run_ms.begin(), run_ms.end());
  r.throughput_per_s = r.mean_ms > 0.0 ? static_cast<double>(batch_rows) / (r.mean_ms / 1000.0) : 0.0;
  return r;
}

LatencyReport measure(const PredictFn& predict, const Matrix& rows, std::size_t model_bytes, const BenchConfig& cfg,
                      std::vector<double>* run_ms) {
  if (cfg.runs == 0) throw ValidationError("bench: runs must be positive");
  using clock = std::chrono::steady_clock;
  double sink = 0.0;
  for (std::size_t i = 0; i < cfg.warmup; ++i) sink += predict(rows).data().front();
  std::vector<double> times;
  times.reserve(cfg.runs);
  for (std::size_t i = 0; i < cfg.runs; ++i) {
    const auto t0 = clock::now();
    const Matrix out = predict(rows);
    const auto t1 = clock::now();
    sink += out.data().empty() ? 0.0 : out.data().front();
    times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  [[maybe_unused]] volatile double keep = sink;
  if (run_ms != nullptr) *run_ms = times;
  return summarize(times, rows.rows(), model_bytes);
}

std::string format_table(const std::vector<std::pair<std::string, LatencyReport>>& rows) {
  std::size_t name_width = 5;
  for (const auto& [name, r] : rows) name_width = std::max(name_width, name.size());
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s  %10s  %10s  %14s  %12s\n", static_cast<int>(name_width), "Model", "Mean ms",
                "P99 ms", "Throughput/s", "Size bytes");
  out += buf;
  out += std::string(name_width + 2 + 10 + 2 + 10 + 2 + 14 + 2 + 12, '-') + "\n";
  for (const auto& [name, r] : rows) {
    std::snprintf(buf, sizeof buf, "%-*s  %10.3f  %10.3f  %14.0f  %12zu\n", static_cast<int>(name_width),
                  name.c_str(), r.mean_ms, r.p99_ms, r.throughput_per_s, r.model_bytes);
    out += buf;
  }
  return out;
}

}  // namespace distillforge::bench
