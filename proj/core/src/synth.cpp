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

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "distillforge/dataset.hpp"
#include "distillforge/error.hpp"
#include "distillforge/random.hpp"

namespace distillforge::data {

namespace {

struct ClusterModel {
  std::vector<std::vector<double>> centroid;  // [class][feature]
  std::vector<std::vector<double>> precision;
  std::vector<double> log_det;
  double x0_center = 0.0;
  double x0_scale = 1.0;
};

ClusterModel make_model(const SynthConfig& cfg) {
  Rng rng(derive_seed(cfg.seed, 1));
  const std::size_t informative = std::max<std::size_t>(2, cfg.d / 2);
  ClusterModel m;
  const auto classes = static_cast<std::size_t>(cfg.classes);
  m.centroid.assign(classes, std::vector<double>(cfg.d, 0.0));
  m.precision.assign(classes, std::vector<double>(cfg.d, 1.0));
  m.log_det.assign(classes, 0.0);
  for (std::size_t c = 0; c < classes; ++c) {
    for (std::size_t j = 0; j < informative && j < cfg.d; ++j) {
      m.centroid[c][j] = cfg.cluster_sep * rng.normal();
      m.precision[c][j] = rng.uniform(0.5, 1.5);
      m.log_det[c] += std::log(m.precision[c][j]);
    }
  }
  double mean = 0.0;
  for (std::size_t c = 0; c < classes; ++c) mean += m.centroid[c][0];
  mean /= static_cast<double>(classes);
  double var = 0.0;
  for (std::size_t c = 0; c < classes; ++c) var += (m.centroid[c][0] - mean) * (m.centroid[c][0] - mean);
  var /= static_cast<double>(classes);
  m.x0_center = mean;
  m.x0_scale = std::sqrt(1.0 + var);
  return m;
}

int bayes_label(const ClusterModel& m, std::span<const double> x) {
  int best = 0;
  double best_score = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < m.centroid.size(); ++c) {
    double score = -m.log_det[c];
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double diff = x[j] - m.centroid[c][j];
      score += m.precision[c][j] * diff * diff;
    }
    if (score < best_score) {
      best_score = score;
      best = static_cast<int>(c);
    }
  }
  return best;
}

}  // namespace

void SynthConfig::validate() const {
  if (classes < 2) throw ValidationError("synth: classes must be at least 2");
  if (d < 2) throw ValidationError("synth: d must be at least 2");
  if (n < 10 * static_cast<std::size_t>(classes))
    throw ValidationError("synth: n must be at least 10 x classes");
  if (!(label_noise >= 0.0 && label_noise <= 1.0)) throw ValidationError("synth: label_noise outside [0, 1]");
  if (!(group_bias >= -1.0 && group_bias <= 1.0)) throw ValidationError("synth: group_bias outside [-1, 1]");
  if (!(cluster_sep >= 0.0)) throw ValidationError("synth: cluster_sep must be non-negative");
}

std::string SynthConfig::to_json() const {
  nlohmann::json j = {{"n", n},
                      {"d", d},
                      {"classes", classes},
                      {"cluster_sep", cluster_sep},
                      {"label_noise", label_noise},
                      {"group_bias", group_bias},
                      {"seed", seed}};
  return j.dump(2) + "\n";
}

SynthConfig SynthConfig::from_json(std::string_view text) {
  try {
    auto j = nlohmann::json::parse(text);
    SynthConfig c;
    c.n = j.value("n", c.n);
    c.d = j.value("d", c.d);
    c.classes = j.value("classes", c.classes);
    c.cluster_sep = j.value("cluster_sep", c.cluster_sep);
    c.label_noise = j.value("label_noise", c.label_noise);
    c.group_bias = j.value("group_bias", c.group_bias);
    c.seed = j.value("seed", c.seed);
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("synth config: ") + e.what());
  }
}

int synth_bayes_label(const SynthConfig& cfg, std::span<const double> x) {
  return bayes_label(make_model(cfg), x);
}

Dataset synth_generate(const SynthConfig& cfg) {
  cfg.validate();
  const auto model = make_model(cfg);
  Rng rng(derive_seed(cfg.seed, 2));
  const auto classes = static_cast<std::size_t>(cfg.classes);

  Dataset ds;
  ds.features = Matrix(cfg.n, cfg.d);
  ds.labels.resize(cfg.n);
  ds.class_count = cfg.classes;
  std::vector<int> group(cfg.n);
  const double residual = std::sqrt(1.0 - cfg.group_bias * cfg.group_bias);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    const std::size_t cluster = i % classes;
    auto x = ds.features.row(i);
    for (std::size_t j = 0; j < cfg.d; ++j) x[j] = model.centroid[cluster][j] + rng.normal();
    int y = bayes_label(model, x);
    if (cfg.label_noise > 0.0 && rng.bernoulli(cfg.label_noise)) {
      const auto shift = 1 + rng.below(classes - 1);
      y = static_cast<int>((static_cast<std::size_t>(y) + shift) % classes);
    }
    ds.labels[i] = y;
    const double z0 = (x[0] - model.x0_center) / model.x0_scale;
    group[i] = cfg.group_bias * z0 + residual * rng.normal() > 0.0 ? 1 : 0;
  }
  for (std::size_t j = 0; j < cfg.d; ++j) {
    ds.feature_names.push_back("x" + std::to_string(j));
    ds.feature_kinds.push_back(ColumnKind::numeric);
    ds.category_levels.emplace_back();
  }
  for (int c = 0; c < cfg.classes; ++c) ds.class_names.push_back(std::to_string(c));
  ds.sensitive["group"] = std::move(group);
  ds.missing_mask.assign(cfg.n * cfg.d, 0);
  auto counts = ds.class_counts();
  if (std::find(counts.begin(), counts.end(), 0u) != counts.end())
    throw ValidationError("synth: generated data is missing a class; increase n or cluster_sep");
  ds.validate();
  return ds;
}

}  // namespace distillforge::data
