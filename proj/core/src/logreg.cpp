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

#include "distillforge/logreg.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <json.hpp>

#include "distillforge/distill.hpp"
#include "distillforge/error.hpp"

namespace distillforge::baselines {

using nlohmann::json;

void LogRegConfig::validate() const {
  if (!(l2 >= 0.0) || !std::isfinite(l2)) throw ValidationError("logreg: l2 must be finite and non-negative");
  if (max_iter < 1) throw ValidationError("logreg: max_iter must be at least 1");
  if (!(tol > 0.0)) throw ValidationError("logreg: tol must be positive");
}

std::string LogRegConfig::to_json() const {
  return json{{"l2", l2}, {"max_iter", max_iter}, {"tol", tol}}.dump(2) + "\n";
}

LogRegConfig LogRegConfig::from_json(std::string_view text) {
  try {
    const auto j = json::parse(text);
    LogRegConfig c;
    c.l2 = j.value("l2", c.l2);
    c.max_iter = j.value("max_iter", c.max_iter);
    c.tol = j.value("tol", c.tol);
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("logreg config: ") + e.what());
  }
}

namespace {

std::size_t slot_count(int classes) { return classes == 2 ? 1 : static_cast<std::size_t>(classes); }

// theta layout: per slot, D weights followed by the bias.
struct Problem {
  const Matrix& x;
  std::span<const int> y;
  std::size_t slots;
  double l2;

  std::size_t width() const { return x.cols() + 1; }

  void row_probs(const Eigen::VectorXd& theta, std::size_t i, std::vector<double>& p) const {
    const std::size_t d = x.cols();
    std::vector<double> z(slots);
    for (std::size_t s = 0; s < slots; ++s) {
      double acc = theta[static_cast<Eigen::Index>(s * width() + d)];
      for (std::size_t j = 0; j < d; ++j) acc += theta[static_cast<Eigen::Index>(s * width() + j)] * x(i, j);
      z[s] = acc;
    }
    if (slots == 1) {
      p.assign(1, distill::sigmoid(z[0]));
    } else {
      p.resize(slots);
      distill::softmax_at(z, 1.0, p);
    }
  }

  double objective(const Eigen::VectorXd& theta) const {
    const std::size_t d = x.cols();
    double loss = 0.0;
    std::vector<double> p;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      row_probs(theta, i, p);
      double py = slots == 1 ? (y[i] == 1 ? p[0] : 1.0 - p[0]) : p[static_cast<std::size_t>(y[i])];
      loss -= std::log(std::max(py, 1e-300));
    }
    double reg = 0.0;
    for (std::size_t s = 0; s < slots; ++s)
      for (std::size_t j = 0; j < d; ++j) reg += theta[static_cast<Eigen::Index>(s * width() + j)] * theta[static_cast<Eigen::Index>(s * width() + j)];
    return loss + 0.5 * l2 * reg;
  }

  void derivatives(const Eigen::VectorXd& theta, Eigen::VectorXd& g, Eigen::MatrixXd& h) const {
    const std::size_t d = x.cols(), w = width();
    const auto n_params = static_cast<Eigen::Index>(slots * w);
    g.setZero(n_params);
    h.setZero(n_params, n_params);
    std::vector<double> p;
    Eigen::VectorXd xt(static_cast<Eigen::Index>(w));
    for (std::size_t i = 0; i < x.rows(); ++i) {
      row_probs(theta, i, p);
      for (std::size_t j = 0; j < d; ++j) xt[static_cast<Eigen::Index>(j)] = x(i, j);
      xt[static_cast<Eigen::Index>(d)] = 1.0;
      const Eigen::MatrixXd outer = xt * xt.transpose();
      for (std::size_t s = 0; s < slots; ++s) {
        const double target = slots == 1 ? (y[i] == 1 ? 1.0 : 0.0) : (y[i] == static_cast<int>(s) ? 1.0 : 0.0);
        const auto bs = static_cast<Eigen::Index>(s * w);
        g.segment(bs, static_cast<Eigen::Index>(w)) += (p[s] - target) * xt;
        for (std::size_t t = 0; t < slots; ++t) {
          const double c = slots == 1 ? p[0] * (1.0 - p[0]) : p[s] * ((s == t ? 1.0 : 0.0) - p[t]);
          h.block(bs, static_cast<Eigen::Index>(t * w), static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(w)) +=
              c * outer;
        }
      }
    }
    for (std::size_t s = 0; s < slots; ++s)
      for (std::size_t j = 0; j < d; ++j) {
        const auto k = static_cast<Eigen::Index>(s * w + j);
        g[k] += l2 * theta[k];
        h(k, k) += l2;
      }
  }
};

}  // namespace

LogRegModel fit_logreg(const data::Dataset& train, const LogRegConfig& cfg) {
  cfg.validate();
  train.validate();
  LogRegModel model;
  model.encoder = data::FeatureEncoder::fit(train);
  model.class_count = train.class_count;
  model.l2 = cfg.l2;
  const Matrix x = model.encoder.transform(train.features);
  const Problem prob{x, train.labels, slot_count(train.class_count), cfg.l2};
  const auto n_params = static_cast<Eigen::Index>(prob.slots * prob.width());

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(n_params);
  Eigen::VectorXd g;
  Eigen::MatrixXd h;
  double f = prob.objective(theta);
  for (model.iterations = 0; model.iterations < cfg.max_iter; ++model.iterations) {
    prob.derivatives(theta, g, h);
    model.gradient_norm = g.norm();
    if (model.gradient_norm <= cfg.tol) {
      model.converged = true;
      break;
    }
    h.diagonal().array() += 1e-8;
    const Eigen::VectorXd step = h.ldlt().solve(g);
    const double slope = g.dot(step);
    double t = 1.0;
    Eigen::VectorXd next;
    double f_next = f;
    for (int k = 0; k < 50; ++k, t *= 0.5) {
      next = theta - t * step;
      f_next = prob.objective(next);
      if (f_next <= f - 1e-4 * t * slope) break;
    }
    if (!(f_next <= f)) break;  // no descent possible in floating point
    theta = std::move(next);
    f = f_next;
  }
  if (!model.converged) {
    prob.derivatives(theta, g, h);
    model.gradient_norm = g.norm();
    model.converged = model.gradient_norm <= cfg.tol;
  }

  const std::size_t d = x.cols();
  model.weights = Matrix(prob.slots, d);
  model.bias.assign(prob.slots, 0.0);
  for (std::size_t s = 0; s < prob.slots; ++s) {
    for (std::size_t j = 0; j < d; ++j) model.weights(s, j) = theta[static_cast<Eigen::Index>(s * prob.width() + j)];
    model.bias[s] = theta[static_cast<Eigen::Index>(s * prob.width() + d)];
  }
  return model;
}

double logreg_objective(const LogRegModel& model, const Matrix& encoded, std::span<const int> labels) {
  const std::size_t d = model.weights.cols();
  const Problem prob{encoded, labels, model.weights.rows(), model.l2};
  Eigen::VectorXd theta(static_cast<Eigen::Index>(prob.slots * prob.width()));
  for (std::size_t s = 0; s < prob.slots; ++s) {
    for (std::size_t j = 0; j < d; ++j) theta[static_cast<Eigen::Index>(s * prob.width() + j)] = model.weights(s, j);
    theta[static_cast<Eigen::Index>(s * prob.width() + d)] = model.bias[s];
  }
  return prob.objective(theta);
}

Matrix LogRegModel::scores(const Matrix& rows) const {
  const Matrix x = encoder.transform(rows);
  Matrix out(x.rows(), weights.rows());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t s = 0; s < weights.rows(); ++s) {
      double acc = bias[s];
      for (std::size_t j = 0; j < x.cols(); ++j) acc += weights(s, j) * x(i, j);
      out(i, s) = acc;
    }
  return out;
}

Matrix LogRegModel::predict_proba(const Matrix& rows) const {
  const Matrix z = scores(rows);
  Matrix out(z.rows(), static_cast<std::size_t>(class_count));
  for (std::size_t i = 0; i < z.rows(); ++i) {
    if (class_count == 2) {
      const double p = distill::sigmoid(z(i, 0));
      out(i, 0) = 1.0 - p;
      out(i, 1) = p;
    } else {
      distill::softmax_at(z.row(i), 1.0, out.row(i));
    }
  }
  return out;
}

Matrix predict_proba(const LogRegModel& model, const Matrix& rows) { return model.predict_proba(rows); }

std::string LogRegModel::serialize() const {
  json enc = json::array();
  for (const auto& c : encoder.columns)
    enc.push_back({{"categorical", c.categorical}, {"mean", c.mean}, {"scale", c.scale}, {"levels", c.levels}});
  json w = json::array();
  for (std::size_t s = 0; s < weights.rows(); ++s) {
    auto r = weights.row(s);
    w.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return json{{"format", "distillforge-logreg"},
              {"version", 1},
              {"class_count", class_count},
              {"l2", l2},
              {"converged", converged},
              {"iterations", iterations},
              {"encoder", std::move(enc)},
              {"weights", std::move(w)},
              {"bias", bias}}
             .dump() +
         "\n";
}

LogRegModel LogRegModel::deserialize(std::string_view text) {
  try {
    const auto j = json::parse(text);
    if (j.at("format") != "distillforge-logreg") throw ValidationError("logreg model: unexpected format tag");
    if (j.at("version") != 1) throw ValidationError("logreg model: unsupported version");
    LogRegModel m;
    m.class_count = j.at("class_count").get<int>();
    m.l2 = j.at("l2").get<double>();
    m.converged = j.value("converged", true);
    m.iterations = j.value("iterations", 0);
    for (const auto& c : j.at("encoder"))
      m.encoder.columns.push_back({c.at("categorical").get<bool>(), c.at("mean").get<double>(),
                                   c.at("scale").get<double>(), c.at("levels").get<int>()});
    const auto rows = j.at("weights").get<std::vector<std::vector<double>>>();
    m.bias = j.at("bias").get<std::vector<double>>();
    const std::size_t width = m.encoder.output_width();
    if (rows.size() != slot_count(m.class_count) || m.bias.size() != rows.size())
      throw ValidationError("logreg model: weight rows do not match class count");
    m.weights = Matrix(rows.size(), width);
    for (std::size_t s = 0; s < rows.size(); ++s) {
      if (rows[s].size() != width) throw ValidationError("logreg model: weight width mismatch");
      std::copy(rows[s].begin(), rows[s].end(), m.weights.row(s).begin());
    }
    return m;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("logreg model: ") + e.what());
  }
}

}  // namespace distillforge::baselines
