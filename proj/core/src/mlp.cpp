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

#include "distillforge/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include <Eigen/Dense>
#include <json.hpp>

#include "distillforge/error.hpp"
#include "distillforge/random.hpp"

namespace distillforge::mlp {

using nlohmann::json;
using RMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CMap = Eigen::Map<const RMat>;
using MMap = Eigen::Map<RMat>;
using CVec = Eigen::Map<const Eigen::RowVectorXd>;

void TrainSchedule::validate() const {
  if (epochs < 1) throw ValidationError("mlp: epochs must be at least 1");
  if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0)) throw ValidationError("mlp: warmup_fraction outside [0, 1)");
  if (!(peak_lr > 0.0)) throw ValidationError("mlp: peak_lr must be positive");
  if (batch_size < 1) throw ValidationError("mlp: batch_size must be at least 1");
  if (!(swa_start_fraction >= 0.0 && swa_start_fraction < 1.0))
    throw ValidationError("mlp: swa_start_fraction outside [0, 1)");
  if (!(smoothing >= 0.0 && smoothing < 1.0)) throw ValidationError("mlp: smoothing outside [0, 1)");
  if (!(augment_sigma >= 0.0)) throw ValidationError("mlp: augment_sigma must be non-negative");
  if (max_restarts < 0) throw ValidationError("mlp: max_restarts must be non-negative");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ValidationError("mlp: dropout outside [0, 1)");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ValidationError("mlp: momentum outside [0, 1)");
  if (!(val_fraction >= 0.0 && val_fraction < 1.0)) throw ValidationError("mlp: val_fraction outside [0, 1)");
}

namespace {

json schedule_json(const TrainSchedule& s) {
  return {{"epochs", s.epochs},
          {"warmup_fraction", s.warmup_fraction},
          {"peak_lr", s.peak_lr},
          {"batch_size", s.batch_size},
          {"swa_start_fraction", s.swa_start_fraction},
          {"smoothing", s.smoothing},
          {"augment_sigma", s.augment_sigma},
          {"max_restarts", s.max_restarts},
          {"dropout", s.dropout},
          {"momentum", s.momentum},
          {"val_fraction", s.val_fraction},
          {"hidden_width", s.hidden_width}};
}

}  // namespace

std::string TrainSchedule::to_json() const { return schedule_json(*this).dump(2) + "\n"; }

TrainSchedule TrainSchedule::from_json(std::string_view text) {
  try {
    const auto j = json::parse(text);
    TrainSchedule s;
    s.epochs = j.value("epochs", s.epochs);
    s.warmup_fraction = j.value("warmup_fraction", s.warmup_fraction);
    s.peak_lr = j.value("peak_lr", s.peak_lr);
    s.batch_size = j.value("batch_size", s.batch_size);
    s.swa_start_fraction = j.value("swa_start_fraction", s.swa_start_fraction);
    s.smoothing = j.value("smoothing", s.smoothing);
    s.augment_sigma = j.value("augment_sigma", s.augment_sigma);
    s.max_restarts = j.value("max_restarts", s.max_restarts);
    s.dropout = j.value("dropout", s.dropout);
    s.momentum = j.value("momentum", s.momentum);
    s.val_fraction = j.value("val_fraction", s.val_fraction);
    s.hidden_width = j.value("hidden_width", s.hidden_width);
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("mlp schedule: ") + e.what());
  }
}

std::size_t embedding_width(std::size_t input_width) { return std::min<std::size_t>(8 * input_width, 128); }

std::size_t hidden_width_for(std::size_t rows) { return std::clamp<std::size_t>(rows / 8, 32, 256); }

double learning_rate_at(const TrainSchedule& sched, std::size_t step, std::size_t total_steps) {
  if (total_steps == 0) return 0.0;
  const auto warmup = static_cast<std::size_t>(std::llround(sched.warmup_fraction * static_cast<double>(total_steps)));
  if (step < warmup) return sched.peak_lr * static_cast<double>(step) / static_cast<double>(warmup);
  const std::size_t span = total_steps - warmup;
  if (span == 0) return sched.peak_lr;
  const double progress = static_cast<double>(step - warmup) / static_cast<double>(span);
  return sched.peak_lr * 0.5 * (1.0 + std::cos(std::numbers::pi * std::min(progress, 1.0)));
}

// ------------------------------------------------------------ parameters

namespace {

struct Layout {
  std::size_t we, be, w1[2], b1[2], w2[2], b2[2], wo, bo, total;

  Layout(std::size_t in, std::size_t e, std::size_t h, std::size_t c) {
    std::size_t off = 0;
    auto take = [&](std::size_t n) {
      const std::size_t at = off;
      off += n;
      return at;
    };
    we = take(e * in);
    be = take(e);
    for (int b = 0; b < 2; ++b) {
      w1[b] = take(h * e);
      b1[b] = take(h);
      w2[b] = take(e * h);
      b2[b] = take(e);
    }
    wo = take(c * e);
    bo = take(c);
    total = off;
  }

  explicit Layout(const MlpParams& p) : Layout(p.input, p.embed, p.hidden, p.classes) {}

  std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>> named(const MlpParams& p) const {
    const std::size_t e = p.embed, h = p.hidden;
    std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>> out = {
        {"embed.weight", {we, e * p.input}}, {"embed.bias", {be, e}}};
    for (int b = 0; b < 2; ++b) {
      const std::string pre = "block" + std::to_string(b) + ".";
      out.push_back({pre + "w1", {w1[b], h * e}});
      out.push_back({pre + "b1", {b1[b], h}});
      out.push_back({pre + "w2", {w2[b], e * h}});
      out.push_back({pre + "b2", {b2[b], e}});
    }
    out.push_back({"head.weight", {wo, p.classes * e}});
    out.push_back({"head.bias", {bo, p.classes}});
    return out;
  }
};

}  // namespace

std::size_t MlpParams::count(std::size_t input, std::size_t embed, std::size_t hidden, std::size_t classes) {
  return Layout(input, embed, hidden, classes).total;
}

MlpParams MlpParams::zeros(std::size_t input, std::size_t embed, std::size_t hidden, std::size_t classes) {
  MlpParams p{input, embed, hidden, classes, {}};
  p.values.assign(count(input, embed, hidden, classes), 0.0);
  return p;
}

bool MlpParams::all_finite() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

// ------------------------------------------------------------ network

namespace {

class Network {
 public:
  explicit Network(const MlpParams& p) : p_(p), layout_(p) {}

  // mask_rng == nullptr disables dropout.
  const RMat& forward(const RMat& x, double dropout, Rng* mask_rng) {
    const std::size_t e = p_.embed, h = p_.hidden, in = p_.input, c = p_.classes;
    const double* v = p_.values.data();
    x_ = &x;
    z_[0] = x * CMap(v + layout_.we, static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(in)).transpose();
    z_[0].rowwise() += CVec(v + layout_.be, static_cast<Eigen::Index>(e));
    for (int b = 0; b < 2; ++b) {
      a_[b] = z_[b] * CMap(v + layout_.w1[b], static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(e)).transpose();
      a_[b].rowwise() += CVec(v + layout_.b1[b], static_cast<Eigen::Index>(h));
      u_[b] = a_[b].cwiseMax(0.0);
      if (mask_rng != nullptr && dropout > 0.0) {
        mask_[b].resize(u_[b].rows(), u_[b].cols());
        const double keep_scale = 1.0 / (1.0 - dropout);
        for (Eigen::Index i = 0; i < mask_[b].size(); ++i)
          mask_[b].data()[i] = mask_rng->uniform() < dropout ? 0.0 : keep_scale;
        u_[b] = u_[b].cwiseProduct(mask_[b]);
        masked_[b] = true;
      } else {
        masked_[b] = false;
      }
      z_[b + 1] = z_[b] + u_[b] * CMap(v + layout_.w2[b], static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(h)).transpose();
      z_[b + 1].rowwise() += CVec(v + layout_.b2[b], static_cast<Eigen::Index>(e));
    }
    logits_ = z_[2] * CMap(v + layout_.wo, static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(e)).transpose();
    logits_.rowwise() += CVec(v + layout_.bo, static_cast<Eigen::Index>(c));
    return logits_;
  }

  // Gradient of sum(dlogits .* logits) through the last forward pass.
  void backward(const RMat& dlogits, std::vector<double>& grad) const {
    const auto e = static_cast<Eigen::Index>(p_.embed), h = static_cast<Eigen::Index>(p_.hidden),
               in = static_cast<Eigen::Index>(p_.input), c = static_cast<Eigen::Index>(p_.classes);
    const double* v = p_.values.data();
    grad.assign(p_.values.size(), 0.0);
    double* g = grad.data();
    MMap(g + layout_.wo, c, e) = dlogits.transpose() * z_[2];
    Eigen::Map<Eigen::RowVectorXd>(g + layout_.bo, c) = dlogits.colwise().sum();
    RMat dz = dlogits * CMap(v + layout_.wo, c, e);
    for (int b = 1; b >= 0; --b) {
      MMap(g + layout_.w2[b], e, h) = dz.transpose() * u_[b];
      Eigen::Map<Eigen::RowVectorXd>(g + layout_.b2[b], e) = dz.colwise().sum();
      RMat da = dz * CMap(v + layout_.w2[b], e, h);
      if (masked_[b]) da = da.cwiseProduct(mask_[b]);
      da = da.cwiseProduct((a_[b].array() > 0.0).cast<double>().matrix());
      MMap(g + layout_.w1[b], h, e) = da.transpose() * z_[b];
      Eigen::Map<Eigen::RowVectorXd>(g + layout_.b1[b], h) = da.colwise().sum();
      dz += da * CMap(v + layout_.w1[b], h, e);
    }
    MMap(g + layout_.we, e, in) = dz.transpose() * (*x_);
    Eigen::Map<Eigen::RowVectorXd>(g + layout_.be, e) = dz.colwise().sum();
  }

 private:
  const MlpParams& p_;
  Layout layout_;
  const RMat* x_ = nullptr;
  RMat z_[3], a_[2], u_[2], mask_[2];
  bool masked_[2] = {false, false};
  RMat logits_;
};

RMat to_eigen(const Matrix& m) {
  return CMap(m.data().data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
}

Matrix from_eigen(const RMat& m) {
  return Matrix(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()),
                std::vector<double>(m.data(), m.data() + m.size()));
}

void check_width(const MlpParams& p, const Matrix& x) {
  if (x.cols() != p.input)
    throw ValidationError("mlp: expected input width " + std::to_string(p.input) + ", got " + std::to_string(x.cols()));
}

}  // namespace

Matrix forward_logits(const MlpParams& params, const Matrix& encoded) {
  check_width(params, encoded);
  Network net(params);
  const RMat x = to_eigen(encoded);
  return from_eigen(net.forward(x, 0.0, nullptr));
}

std::vector<double> loss_gradient(const MlpParams& params, const Matrix& encoded,
                                  const distill::DistillTargets& targets, const distill::LossConfig& cfg,
                                  double smoothing) {
  check_width(params, encoded);
  Network net(params);
  const RMat x = to_eigen(encoded);
  const Matrix logits = from_eigen(net.forward(x, 0.0, nullptr));
  const Matrix dlogits = distill::mixed_gradient_mlp(logits, targets, cfg, smoothing);
  std::vector<double> grad;
  net.backward(to_eigen(dlogits), grad);
  return grad;
}

// ------------------------------------------------------------ collapse

Health collapse_check(const Matrix& val_probs, double entropy_threshold, double dominance_threshold,
                      bool params_finite) {
  if (!params_finite) return Health::collapsed;
  if (val_probs.rows() < 10) throw ValidationError("collapse_check: need at least 10 validation rows");
  std::vector<std::size_t> argmax_counts(val_probs.cols(), 0);
  double entropy = 0.0;
  for (std::size_t i = 0; i < val_probs.rows(); ++i) {
    auto p = val_probs.row(i);
    for (double v : p)
      if (!std::isfinite(v)) return Health::collapsed;
    entropy += distill::normalized_entropy(p);
    ++argmax_counts[static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin())];
  }
  entropy /= static_cast<double>(val_probs.rows());
  const double dominant = static_cast<double>(*std::max_element(argmax_counts.begin(), argmax_counts.end())) /
                          static_cast<double>(val_probs.rows());
  return entropy < entropy_threshold && dominant > dominance_threshold ? Health::collapsed : Health::healthy;
}

RestartPlan restart_policy(double current_dropout, int attempt, std::uint64_t base_seed) {
  const double base = current_dropout > 0.0 ? current_dropout : 0.1;
  return {std::min(0.5, base * 1.5), base_seed + static_cast<std::uint64_t>(attempt)};
}

// ------------------------------------------------------------ model

Matrix MlpModel::logits(const Matrix& rows) const { return forward_logits(params, encoder.transform(rows)); }

Matrix MlpModel::predict_proba(const Matrix& rows) const {
  Matrix z = logits(rows);
  Matrix out(z.rows(), z.cols());
  for (std::size_t i = 0; i < z.rows(); ++i) distill::softmax_at(z.row(i), 1.0, out.row(i));
  return out;
}

Matrix predict_proba(const MlpModel& model, const Matrix& rows) { return model.predict_proba(rows); }

std::string MlpModel::serialize() const {
  json enc = json::array();
  for (const auto& c : encoder.columns)
    enc.push_back({{"categorical", c.categorical}, {"mean", c.mean}, {"scale", c.scale}, {"levels", c.levels}});
  json weights = json::object();
  for (const auto& [name, slice] : Layout(params).named(params))
    weights[name] = std::vector<double>(params.values.begin() + static_cast<std::ptrdiff_t>(slice.first),
                                        params.values.begin() + static_cast<std::ptrdiff_t>(slice.first + slice.second));
  json j = {{"format", "distillforge-mlp"},
            {"version", 1},
            {"dims",
             {{"input", params.input}, {"embed", params.embed}, {"hidden", params.hidden}, {"classes", params.classes}}},
            {"dropout", dropout},
            {"swa", swa},
            {"collapsed", collapsed},
            {"restarts", restarts},
            {"seed", seed},
            {"encoder", std::move(enc)},
            {"weights", std::move(weights)}};
  return j.dump() + "\n";
}

MlpModel MlpModel::deserialize(std::string_view text) {
  try {
    const auto j = json::parse(text);
    if (j.at("format") != "distillforge-mlp") throw ValidationError("mlp model: unexpected format tag");
    if (j.at("version") != 1) throw ValidationError("mlp model: unsupported version");
    MlpModel m;
    const auto& dims = j.at("dims");
    m.params = MlpParams::zeros(dims.at("input").get<std::size_t>(), dims.at("embed").get<std::size_t>(),
                                dims.at("hidden").get<std::size_t>(), dims.at("classes").get<std::size_t>());
    m.dropout = j.at("dropout").get<double>();
    m.swa = j.at("swa").get<bool>();
    m.collapsed = j.value("collapsed", false);
    m.restarts = j.value("restarts", 0);
    m.seed = j.value("seed", std::uint64_t{0});
    for (const auto& c : j.at("encoder"))
      m.encoder.columns.push_back({c.at("categorical").get<bool>(), c.at("mean").get<double>(),
                                   c.at("scale").get<double>(), c.at("levels").get<int>()});
    if (m.encoder.output_width() != m.params.input) throw ValidationError("mlp model: encoder width mismatch");
    const auto& weights = j.at("weights");
    for (const auto& [name, slice] : Layout(m.params).named(m.params)) {
      const auto values = weights.at(name).get<std::vector<double>>();
      if (values.size() != slice.second) throw ValidationError("mlp model: wrong size for " + name);
      std::copy(values.begin(), values.end(), m.params.values.begin() + static_cast<std::ptrdiff_t>(slice.first));
    }
    return m;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("mlp model: ") + e.what());
  }
}

// ------------------------------------------------------------ training

namespace {

void initialise(MlpParams& p, Rng& rng) {
  const Layout l(p);
  auto fill = [&](std::size_t offset, std::size_t n, double bound) {
    for (std::size_t i = 0; i < n; ++i) p.values[offset + i] = rng.uniform(-bound, bound);
  };
  const double e = static_cast<double>(p.embed), h = static_cast<double>(p.hidden);
  fill(l.we, p.embed * p.input, std::sqrt(3.0 / static_cast<double>(p.input)));
  for (int b = 0; b < 2; ++b) {
    fill(l.w1[b], p.hidden * p.embed, std::sqrt(6.0 / e));
    fill(l.w2[b], p.embed * p.hidden, 0.5 * std::sqrt(3.0 / h));
  }
  fill(l.wo, p.classes * p.embed, std::sqrt(3.0 / e));
}

Matrix softmax_rows(const RMat& logits) {
  Matrix out(static_cast<std::size_t>(logits.rows()), static_cast<std::size_t>(logits.cols()));
  for (std::size_t i = 0; i < out.rows(); ++i)
    distill::softmax_at(std::span<const double>(logits.row(static_cast<Eigen::Index>(i)).data(), out.cols()), 1.0,
                        out.row(i));
  return out;
}

}  // namespace

MlpModel fit_mlp(const data::Dataset& train, const distill::DistillTargets& targets, const TrainSchedule& sched,
                 const distill::LossConfig& cfg, std::uint64_t seed, const FitHooks& hooks) {
  sched.validate();
  cfg.validate();
  if (targets.rows() != train.rows()) throw ValidationError("mlp: targets do not cover the training rows");
  if (train.rows() == 0) throw ValidationError("mlp: empty training set");

  MlpModel model;
  model.encoder = data::FeatureEncoder::fit(train);
  model.seed = seed;
  const Matrix encoded = model.encoder.transform(train.features);
  const std::size_t in = encoded.cols();
  const auto classes = static_cast<std::size_t>(train.class_count);

  data::SplitIndices split;
  if (sched.val_fraction > 0.0) {
    split = data::stratified_split_indices(train.labels, train.class_count, sched.val_fraction, derive_seed(seed, 0x5a1));
  } else {
    for (std::size_t i = 0; i < train.rows(); ++i) split.train.push_back(i);
  }
  const auto& fit_rows = split.train;
  // The collapse detector needs at least 10 rows; fall back to training rows.
  const auto& monitor_rows = split.test.size() >= 10 ? split.test : fit_rows;
  const RMat x_monitor = to_eigen(encoded.select_rows(monitor_rows));
  const distill::DistillTargets monitor_targets = targets.subset(monitor_rows);

  std::vector<double> jitter_scale(in, 0.0);
  if (sched.augment_sigma > 0.0) {
    for (std::size_t c = 0; c < in; ++c) {
      double mean = 0.0;
      for (auto r : fit_rows) mean += encoded(r, c);
      mean /= static_cast<double>(fit_rows.size());
      double ss = 0.0;
      for (auto r : fit_rows) ss += (encoded(r, c) - mean) * (encoded(r, c) - mean);
      jitter_scale[c] = sched.augment_sigma * std::sqrt(ss / static_cast<double>(fit_rows.size()));
    }
  }

  const std::size_t embed = embedding_width(in);
  const std::size_t hidden = sched.hidden_width ? sched.hidden_width : hidden_width_for(train.rows());
  const std::size_t batches_per_epoch = (fit_rows.size() + sched.batch_size - 1) / sched.batch_size;
  const std::size_t total_steps = batches_per_epoch * static_cast<std::size_t>(sched.epochs);
  const int swa_after = static_cast<int>(std::floor(sched.swa_start_fraction * sched.epochs));

  double dropout = sched.dropout;
  std::uint64_t run_seed = seed;
  std::optional<MlpParams> best_healthy;
  double best_healthy_loss = INFINITY;

  for (int attempt = 0;; ++attempt) {
    Rng rng(run_seed);
    MlpParams params = MlpParams::zeros(in, embed, hidden, classes);
    initialise(params, rng);
    std::vector<double> velocity(params.values.size(), 0.0);
    std::vector<double> swa(params.values.size(), 0.0);
    int swa_count = 0;
    std::vector<std::size_t> order(fit_rows);
    std::vector<double> grad;
    Network net(params);
    bool collapsed = false;
    std::size_t step = 0;

    for (int epoch = 1; epoch <= sched.epochs; ++epoch) {
      rng.shuffle(std::span<std::size_t>(order));
      for (std::size_t start = 0; start < order.size(); start += sched.batch_size) {
        const std::size_t stop = std::min(order.size(), start + sched.batch_size);
        const std::span<const std::size_t> batch(order.data() + start, stop - start);
        RMat xb(static_cast<Eigen::Index>(batch.size()), static_cast<Eigen::Index>(in));
        for (std::size_t i = 0; i < batch.size(); ++i)
          for (std::size_t c = 0; c < in; ++c)
            xb(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
                encoded(batch[i], c) + (jitter_scale[c] > 0.0 ? jitter_scale[c] * rng.normal() : 0.0);
        const RMat& logits = net.forward(xb, dropout, &rng);
        const auto tb = targets.subset(batch);
        Matrix dlogits = distill::mixed_gradient_mlp(from_eigen(logits), tb, cfg, sched.smoothing);
        const double inv_batch = 1.0 / static_cast<double>(batch.size());
        for (auto& v : dlogits.data()) v *= inv_batch;
        net.backward(to_eigen(dlogits), grad);
        const double lr = learning_rate_at(sched, step++, total_steps);
        for (std::size_t k = 0; k < params.values.size(); ++k) {
          velocity[k] = sched.momentum * velocity[k] + grad[k];
          params.values[k] -= lr * velocity[k];
        }
      }

      const Matrix monitor_logits = from_eigen(net.forward(x_monitor, 0.0, nullptr));
      const bool finite = params.all_finite();
      Health health = finite ? collapse_check(softmax_rows(to_eigen(monitor_logits))) : Health::collapsed;
      if (hooks.force_collapse && hooks.force_collapse(attempt, epoch)) health = Health::collapsed;
      if (health == Health::collapsed) {
        collapsed = true;
        break;
      }
      const double monitor_loss = distill::mixed_loss(monitor_logits, monitor_targets, cfg, sched.smoothing);
      if (monitor_loss < best_healthy_loss) {
        best_healthy_loss = monitor_loss;
        best_healthy = params;
      }
      if (epoch > swa_after) {
        ++swa_count;
        const double inv = 1.0 / static_cast<double>(swa_count);
        for (std::size_t k = 0; k < swa.size(); ++k) swa[k] += (params.values[k] - swa[k]) * inv;
        if (hooks.on_swa_snapshot) hooks.on_swa_snapshot(epoch, params);
      }
    }

    model.dropout = dropout;
    model.restarts = attempt;
    if (!collapsed) {
      model.swa = swa_count > 0;
      if (model.swa) params.values = std::move(swa);
      model.params = std::move(params);
      return model;
    }
    if (attempt >= sched.max_restarts) {
      model.collapsed = true;
      model.swa = false;
      model.params = best_healthy ? std::move(*best_healthy) : std::move(params);
      return model;
    }
    const auto plan = restart_policy(dropout, attempt + 1, seed);
    dropout = plan.dropout;
    run_seed = plan.seed;
    if (hooks.on_restart) hooks.on_restart(attempt + 1, dropout);
  }
}

MlpModel fit_mlp_hard(const data::Dataset& train, const TrainSchedule& sched, std::uint64_t seed,
                      const FitHooks& hooks) {
  distill::LossConfig hard;
  hard.alpha = 0.0;
  hard.fixed_temperature = 1.0;
  hard.confidence_weighting = false;
  return fit_mlp(train, distill::hard_targets(train.labels, train.class_count), sched, hard, seed, hooks);
}

}  // namespace distillforge::mlp
