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

#include "distillforge/distill.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>

#include <json.hpp>

#include "distillforge/error.hpp"

namespace distillforge::distill {

void LossConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("loss: alpha must lie in [0, 1]");
  if (!(t_min >= 1.0)) throw ValidationError("loss: t_min must be at least 1");
  if (!(t_max >= t_min)) throw ValidationError("loss: t_max must be at least t_min");
  if (!(sigma > 0.0)) throw ValidationError("loss: sigma must be positive");
  if (!std::isfinite(mu)) throw ValidationError("loss: mu must be finite");
  if (fixed_temperature && !(*fixed_temperature > 0.0))
    throw ValidationError("loss: fixed temperature must be positive");
}

std::string LossConfig::to_json() const {
  nlohmann::json j = {{"alpha", alpha}, {"t_min", t_min}, {"t_max", t_max},
                      {"mu", mu},       {"sigma", sigma}, {"confidence_weighting", confidence_weighting}};
  j["fixed_temperature"] = fixed_temperature ? nlohmann::json(*fixed_temperature) : nlohmann::json(nullptr);
  return j.dump(2) + "\n";
}

LossConfig LossConfig::from_json(std::string_view text) {
  try {
    auto j = nlohmann::json::parse(text);
    LossConfig c;
    c.alpha = j.value("alpha", c.alpha);
    c.t_min = j.value("t_min", c.t_min);
    c.t_max = j.value("t_max", c.t_max);
    c.mu = j.value("mu", c.mu);
    c.sigma = j.value("sigma", c.sigma);
    c.confidence_weighting = j.value("confidence_weighting", c.confidence_weighting);
    if (j.contains("fixed_temperature") && !j["fixed_temperature"].is_null())
      c.fixed_temperature = j["fixed_temperature"].get<double>();
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("loss config: ") + e.what());
  }
}

double normalized_entropy(std::span<const double> p) {
  if (p.size() < 2) return 0.0;
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log(v);
  return std::clamp(h / std::log(static_cast<double>(p.size())), 0.0, 1.0);
}

double adaptive_temperature(std::span<const double> p, const LossConfig& cfg) {
  if (cfg.fixed_temperature) return *cfg.fixed_temperature;
  return cfg.t_min + (cfg.t_max - cfg.t_min) * normalized_entropy(p);
}

double confidence_weight(std::span<const double> p, const LossConfig& cfg) {
  if (!cfg.confidence_weighting) return 1.0;
  const double d = normalized_entropy(p) - cfg.mu;
  return std::max(std::exp(-d * d / (2.0 * cfg.sigma * cfg.sigma)), DBL_MIN);
}

DistillTargets DistillTargets::subset(std::span<const std::size_t> rows) const {
  DistillTargets out;
  out.class_count = class_count;
  out.soft_probs = soft_probs.select_rows(rows);
  out.soft_logits = soft_logits.select_rows(rows);
  for (auto r : rows) {
    if (!binary_logit.empty()) out.binary_logit.push_back(binary_logit[r]);
    out.temperature.push_back(temperature[r]);
    out.weight.push_back(weight[r]);
    out.hard_label.push_back(hard_label[r]);
  }
  return out;
}

namespace {

void fill_logits(DistillTargets& t) {
  const std::size_t n = t.soft_probs.rows();
  const std::size_t c = t.soft_probs.cols();
  t.soft_logits = Matrix(n, c);
  if (c == 2) t.binary_logit.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto p = t.soft_probs.row(i);
    auto z = t.soft_logits.row(i);
    double mean = 0.0;
    for (std::size_t k = 0; k < c; ++k) {
      z[k] = std::log(std::clamp(p[k], kProbClip, 1.0 - kProbClip));
      mean += z[k];
    }
    mean /= static_cast<double>(c);
    if (c == 2) t.binary_logit[i] = z[1] - z[0];
    for (auto& v : z) v -= mean;
  }
}

// log-softmax of logits / T into out; returns nothing, out holds log-probs.
void log_softmax_at(std::span<const double> logits, double temperature, std::span<double> out) {
  double mx = -INFINITY;
  for (double z : logits) mx = std::max(mx, z / temperature);
  double sum = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) sum += std::exp(logits[k] / temperature - mx);
  const double lse = mx + std::log(sum);
  for (std::size_t k = 0; k < logits.size(); ++k) out[k] = logits[k] / temperature - lse;
}

void check_rows(const Matrix& logits, const DistillTargets& t) {
  if (logits.rows() != t.rows() || logits.cols() != static_cast<std::size_t>(t.class_count))
    throw ValidationError("mixed loss: student logits shape does not match targets");
}

}  // namespace

DistillTargets build_targets(const Matrix& soft_probs, std::span<const int> labels, const LossConfig& cfg) {
  cfg.validate();
  if (soft_probs.rows() != labels.size()) throw ValidationError("build_targets: soft labels do not cover labels");
  DistillTargets t;
  t.class_count = static_cast<int>(soft_probs.cols());
  t.soft_probs = soft_probs;
  t.hard_label.assign(labels.begin(), labels.end());
  fill_logits(t);
  t.temperature.resize(labels.size());
  t.weight.resize(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    t.temperature[i] = adaptive_temperature(soft_probs.row(i), cfg);
    t.weight[i] = confidence_weight(soft_probs.row(i), cfg);
  }
  return t;
}

DistillTargets build_targets(const teacher::SoftLabelSet& soft, std::span<const int> labels,
                             const LossConfig& cfg) {
  return build_targets(soft.probs, labels, cfg);
}

DistillTargets hard_targets(std::span<const int> labels, int class_count) {
  DistillTargets t;
  t.class_count = class_count;
  t.soft_probs = Matrix(labels.size(), static_cast<std::size_t>(class_count));
  for (std::size_t i = 0; i < labels.size(); ++i) t.soft_probs(i, static_cast<std::size_t>(labels[i])) = 1.0;
  t.hard_label.assign(labels.begin(), labels.end());
  fill_logits(t);
  t.temperature.assign(labels.size(), 1.0);
  t.weight.assign(labels.size(), 1.0);
  return t;
}

void softmax_at(std::span<const double> logits, double temperature, std::span<double> out) {
  log_softmax_at(logits, temperature, out);
  for (auto& v : out) v = std::exp(v);
}

double mixed_loss(const Matrix& student_logits, const DistillTargets& targets, const LossConfig& cfg,
                  double smoothing) {
  check_rows(student_logits, targets);
  const std::size_t c = student_logits.cols();
  std::vector<double> log_p(c), log_q(c), log_q1(c);
  double soft_total = 0.0;
  double hard_total = 0.0;
  for (std::size_t i = 0; i < targets.rows(); ++i) {
    const double t = targets.temperature[i];
    const double w = targets.weight[i];
    if (cfg.alpha > 0.0) {
      log_softmax_at(targets.soft_logits.row(i), t, log_p);
      log_softmax_at(student_logits.row(i), t, log_q);
      double kl = 0.0;
      for (std::size_t k = 0; k < c; ++k) kl += std::exp(log_p[k]) * (log_p[k] - log_q[k]);
      soft_total += w * t * t * std::max(kl, 0.0);
    }
    if (cfg.alpha < 1.0) {
      log_softmax_at(student_logits.row(i), 1.0, log_q1);
      double ce = 0.0;
      for (std::size_t k = 0; k < c; ++k) {
        const double y = (static_cast<int>(k) == targets.hard_label[i] ? 1.0 - smoothing : 0.0) +
                         smoothing / static_cast<double>(c);
        if (y != 0.0) ce -= y * log_q1[k];
      }
      hard_total += w * ce;
    }
  }
  return cfg.alpha * soft_total + (1.0 - cfg.alpha) * hard_total;
}

Matrix mixed_gradient_mlp(const Matrix& student_logits, const DistillTargets& targets, const LossConfig& cfg,
                          double smoothing) {
  check_rows(student_logits, targets);
  const std::size_t c = student_logits.cols();
  Matrix grad(student_logits.rows(), c);
  std::vector<double> p(c), q(c);
  for (std::size_t i = 0; i < targets.rows(); ++i) {
    const double t = targets.temperature[i];
    const double w = targets.weight[i];
    auto g = grad.row(i);
    if (cfg.alpha > 0.0) {
      softmax_at(targets.soft_logits.row(i), t, p);
      softmax_at(student_logits.row(i), t, q);
      const double scale = cfg.alpha * w * t;
      for (std::size_t k = 0; k < c; ++k) g[k] += scale * (q[k] - p[k]);
    }
    if (cfg.alpha < 1.0) {
      softmax_at(student_logits.row(i), 1.0, q);
      const double scale = (1.0 - cfg.alpha) * w;
      for (std::size_t k = 0; k < c; ++k) {
        const double y = (static_cast<int>(k) == targets.hard_label[i] ? 1.0 - smoothing : 0.0) +
                         smoothing / static_cast<double>(c);
        g[k] += scale * (q[k] - y);
      }
    }
  }
  return grad;
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

namespace {

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

}  // namespace

double tree_loss(double raw, double soft_logit, double temperature, double weight, int label, double alpha) {
  double loss = 0.0;
  if (alpha > 0.0) {
    const double diff = raw - soft_logit / temperature;
    loss += alpha * weight * temperature * temperature * diff * diff * 0.5;
  }
  if (alpha < 1.0) loss += (1.0 - alpha) * weight * (softplus(raw) - label * raw);
  return loss;
}

GradPair tree_gradient(double raw, double soft_logit, double temperature, double weight, int label,
                       double alpha) {
  const double t2 = temperature * temperature;
  const double s = sigmoid(raw);
  GradPair gp;
  if (alpha > 0.0) {
    gp.grad += alpha * weight * t2 * (raw - soft_logit / temperature);
    gp.hess += alpha * weight * t2;
  }
  if (alpha < 1.0) {
    gp.grad += (1.0 - alpha) * weight * (s - label);
    gp.hess += (1.0 - alpha) * weight * s * (1.0 - s);
  }
  return gp;
}

ScalarTargets binary_view(const DistillTargets& targets) {
  if (targets.class_count != 2) throw ValidationError("binary view requires a two-class target set");
  ScalarTargets s;
  s.soft_logit = targets.binary_logit;
  s.temperature = targets.temperature;
  s.weight = targets.weight;
  s.label = targets.hard_label;
  return s;
}

ScalarTargets one_vs_rest_view(const DistillTargets& targets, int cls) {
  if (cls < 0 || cls >= targets.class_count) throw ValidationError("one-vs-rest: class out of range");
  ScalarTargets s;
  const std::size_t n = targets.rows();
  s.soft_logit.resize(n);
  s.label.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = std::clamp(targets.soft_probs(i, static_cast<std::size_t>(cls)), kProbClip, 1.0 - kProbClip);
    s.soft_logit[i] = std::log(p / (1.0 - p));
    s.label[i] = targets.hard_label[i] == cls ? 1 : 0;
  }
  s.temperature = targets.temperature;
  s.weight = targets.weight;
  return s;
}

std::vector<GradPair> mixed_gradient_tree(std::span<const double> raw_score, const ScalarTargets& targets,
                                          const LossConfig& cfg) {
  if (raw_score.size() != targets.rows()) throw ValidationError("tree gradient: row count mismatch");
  std::vector<GradPair> out(raw_score.size());
  for (std::size_t i = 0; i < raw_score.size(); ++i)
    out[i] = tree_gradient(raw_score[i], targets.soft_logit[i], targets.temperature[i], targets.weight[i],
                           targets.label[i], cfg.alpha);
  return out;
}

std::vector<GradPair> mixed_gradient_tree(std::span<const double> raw_score, const DistillTargets& targets,
                                          const LossConfig& cfg) {
  return mixed_gradient_tree(raw_score, binary_view(targets), cfg);
}

}  // namespace distillforge::distill
