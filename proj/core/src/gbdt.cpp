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

#include "distillforge/gbdt.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "distillforge/error.hpp"
#include "distillforge/random.hpp"
#include "split_finder.hpp"

namespace distillforge::gbdt {

using nlohmann::json;

namespace {

json config_json(const GbdtConfig& c) {
  return {{"n_trees", c.n_trees},           {"max_depth", c.max_depth}, {"patience", c.patience},
          {"learning_rate", c.learning_rate}, {"min_leaf", c.min_leaf},   {"lambda", c.lambda},
          {"val_fraction", c.val_fraction}, {"seed", c.seed},           {"one_vs_rest", c.one_vs_rest}};
}

GbdtConfig config_from(const json& j) {
  GbdtConfig c;
  c.n_trees = j.value("n_trees", c.n_trees);
  c.max_depth = j.value("max_depth", c.max_depth);
  c.patience = j.value("patience", c.patience);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.min_leaf = j.value("min_leaf", c.min_leaf);
  c.lambda = j.value("lambda", c.lambda);
  c.val_fraction = j.value("val_fraction", c.val_fraction);
  c.seed = j.value("seed", c.seed);
  c.one_vs_rest = j.value("one_vs_rest", c.one_vs_rest);
  return c;
}

}  // namespace

void GbdtConfig::validate() const {
  if (n_trees < 0) throw ValidationError("gbdt: n_trees must be non-negative");
  if (max_depth < 0) throw ValidationError("gbdt: max_depth must be non-negative");
  if (patience < 1) throw ValidationError("gbdt: patience must be at least 1");
  if (!(learning_rate > 0.0)) throw ValidationError("gbdt: learning_rate must be positive");
  if (min_leaf < 1) throw ValidationError("gbdt: min_leaf must be at least 1");
  if (!(lambda >= 0.0)) throw ValidationError("gbdt: lambda must be non-negative");
  if (!(val_fraction >= 0.0 && val_fraction < 1.0)) throw ValidationError("gbdt: val_fraction must lie in [0, 1)");
}

std::string GbdtConfig::to_json() const { return config_json(*this).dump(2) + "\n"; }

GbdtConfig GbdtConfig::from_json(std::string_view text) {
  try {
    auto c = config_from(json::parse(text));
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("gbdt config: ") + e.what());
  }
}

double predict_tree(const Tree& tree, std::span<const double> x) {
  std::size_t node = 0;
  while (!tree[node].is_leaf()) {
    const auto& n = tree[node];
    const double v = x[static_cast<std::size_t>(n.feature)];
    node = static_cast<std::size_t>(std::isnan(v) || v <= n.threshold ? n.left : n.right);
  }
  return tree[node].value;
}

int tree_depth(const Tree& tree) {
  std::vector<int> depth(tree.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < tree.size(); ++i) {
    if (tree[i].is_leaf()) continue;
    for (int child : {tree[i].left, tree[i].right}) {
      depth[static_cast<std::size_t>(child)] = depth[i] + 1;
      deepest = std::max(deepest, depth[i] + 1);
    }
  }
  return deepest;
}

bool EarlyStopping::update(double loss) {
  ++iteration_;
  if (best_iteration_ == 0 || loss < best_loss_) {
    best_loss_ = loss;
    best_iteration_ = iteration_;
  }
  return iteration_ - best_iteration_ >= patience_;
}

Matrix BoostedModel::raw_scores(const Matrix& rows) const {
  if (rows.cols() != feature_count)
    throw ValidationError("gbdt: expected " + std::to_string(feature_count) + " features, got " +
                          std::to_string(rows.cols()));
  Matrix out(rows.rows(), slots());
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    auto x = rows.row(r);
    for (std::size_t s = 0; s < slots(); ++s) {
      double f = 0.0;
      for (const auto& tree : trees[s]) f += predict_tree(tree, x);
      out(r, s) = base_scores[s] + learning_rate * f;
    }
  }
  return out;
}

Matrix BoostedModel::predict_proba(const Matrix& rows) const {
  const Matrix raw = raw_scores(rows);
  const auto classes = static_cast<std::size_t>(class_count);
  Matrix out(rows.rows(), classes);
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    if (slots() == 1) {
      const double p = distill::sigmoid(raw(r, 0));
      out(r, 0) = 1.0 - p;
      out(r, 1) = p;
      continue;
    }
    double sum = 0.0;
    for (std::size_t c = 0; c < classes; ++c) sum += out(r, c) = distill::sigmoid(raw(r, c));
    for (std::size_t c = 0; c < classes; ++c) out(r, c) /= sum;
  }
  return out;
}

Matrix predict_proba(const BoostedModel& model, const Matrix& rows) { return model.predict_proba(rows); }

std::string BoostedModel::serialize() const {
  json trees_json = json::array();
  for (std::size_t s = 0; s < trees.size(); ++s) {
    for (const auto& tree : trees[s]) {
      json nodes = json::array();
      for (const auto& n : tree) nodes.push_back(json::array({n.feature, n.threshold, n.left, n.right, n.value}));
      trees_json.push_back({{"slot", s}, {"nodes", std::move(nodes)}});
    }
  }
  json j = {{"format", "distillforge-gbdt"},
            {"version", 1},
            {"config", config_json(config)},
            {"alpha", alpha},
            {"class_count", class_count},
            {"feature_count", feature_count},
            {"learning_rate", learning_rate},
            {"base_score", base_scores.empty() ? 0.0 : base_scores.front()},
            {"base_scores", base_scores},
            {"best_iteration", best_iteration},
            {"validation_loss", validation_loss},
            {"trees", std::move(trees_json)}};
  return j.dump() + "\n";
}

BoostedModel BoostedModel::deserialize(std::string_view text) {
  try {
    const auto j = json::parse(text);
    if (j.at("format") != "distillforge-gbdt") throw ValidationError("gbdt model: unexpected format tag");
    if (j.at("version") != 1) throw ValidationError("gbdt model: unsupported version");
    BoostedModel m;
    m.config = config_from(j.at("config"));
    m.alpha = j.at("alpha").get<double>();
    m.class_count = j.at("class_count").get<int>();
    m.feature_count = j.at("feature_count").get<std::size_t>();
    m.learning_rate = j.at("learning_rate").get<double>();
    m.base_scores = j.at("base_scores").get<std::vector<double>>();
    m.best_iteration = j.at("best_iteration").get<int>();
    m.validation_loss = j.at("validation_loss").get<std::vector<double>>();
    m.trees.resize(m.base_scores.size());
    for (const auto& t : j.at("trees")) {
      const auto slot = t.at("slot").get<std::size_t>();
      if (slot >= m.trees.size()) throw ValidationError("gbdt model: tree slot out of range");
      Tree tree;
      for (const auto& n : t.at("nodes"))
        tree.push_back({n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(), n.at(3).get<int>(),
                        n.at(4).get<double>()});
      for (std::size_t i = 0; i < tree.size(); ++i) {
        const auto& n = tree[i];
        if (n.is_leaf()) continue;
        if (n.left <= 0 || n.right <= 0 || static_cast<std::size_t>(std::max(n.left, n.right)) >= tree.size() ||
            static_cast<std::size_t>(n.feature) >= m.feature_count)
          throw ValidationError("gbdt model: malformed tree");
      }
      if (tree.empty()) throw ValidationError("gbdt model: empty tree");
      m.trees[slot].push_back(std::move(tree));
    }
    return m;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("gbdt model: ") + e.what());
  }
}

data::SplitIndices validation_split(std::span<const int> labels, int class_count, const GbdtConfig& cfg) {
  if (cfg.val_fraction <= 0.0) {
    data::SplitIndices all;
    all.train.resize(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) all.train[i] = i;
    return all;
  }
  return data::stratified_split_indices(labels, class_count, cfg.val_fraction, derive_seed(cfg.seed, 0x7a1));
}

namespace {

double constant_fit(const distill::ScalarTargets& t, std::span<const std::size_t> rows, double alpha) {
  double f = 0.0;
  for (int it = 0; it < 100; ++it) {
    double g = 0.0, h = 0.0;
    for (auto r : rows) {
      const auto gp = distill::tree_gradient(f, t.soft_logit[r], t.temperature[r], t.weight[r], t.label[r], alpha);
      g += gp.grad;
      h += gp.hess;
    }
    if (!(h > 0.0)) break;
    const double step = -g / h;
    f = std::clamp(f + step, -30.0, 30.0);
    if (std::abs(step) < 1e-12) break;
  }
  return f;
}

bool degenerate(const distill::ScalarTargets& t, std::span<const std::size_t> rows, double alpha) {
  if (rows.empty()) return true;
  const auto r0 = rows.front();
  for (auto r : rows) {
    if (t.weight[r] != t.weight[r0]) return false;
    if (alpha > 0.0 && (t.soft_logit[r] != t.soft_logit[r0] || t.temperature[r] != t.temperature[r0])) return false;
    if (alpha < 1.0 && t.label[r] != t.label[r0]) return false;
  }
  return true;
}

}  // namespace

BoostedModel fit_distilled(const data::Dataset& train, const distill::DistillTargets& targets,
                           const distill::LossConfig& loss, const GbdtConfig& cfg) {
  cfg.validate();
  loss.validate();
  if (targets.rows() != train.rows()) throw ValidationError("gbdt: targets do not cover the training rows");
  if (train.class_count > 2 && !cfg.one_vs_rest)
    throw ValidationError("gbdt: multiclass distillation requires the experimental one-vs-rest mode");

  BoostedModel model;
  model.class_count = train.class_count;
  model.feature_count = train.feature_count();
  model.learning_rate = cfg.learning_rate;
  model.alpha = loss.alpha;
  model.config = cfg;

  std::vector<distill::ScalarTargets> views;
  if (train.class_count == 2) {
    views.push_back(distill::binary_view(targets));
  } else {
    for (int c = 0; c < train.class_count; ++c) views.push_back(distill::one_vs_rest_view(targets, c));
  }
  const std::size_t slots = views.size();

  const auto split = validation_split(train.labels, train.class_count, cfg);
  const auto& fit_rows = split.train;
  const auto& val_rows = split.test;
  const bool early_stop = !val_rows.empty();

  const Matrix x_fit = train.features.select_rows(fit_rows);
  const Matrix x_val = train.features.select_rows(val_rows);

  model.base_scores.resize(slots);
  model.trees.resize(slots);
  bool all_degenerate = true;
  for (std::size_t s = 0; s < slots; ++s) {
    model.base_scores[s] = constant_fit(views[s], fit_rows, loss.alpha);
    all_degenerate = all_degenerate && degenerate(views[s], fit_rows, loss.alpha);
  }
  if (all_degenerate || cfg.n_trees == 0) return model;

  const auto index = detail::ColumnIndex::build(x_fit);
  std::vector<std::vector<double>> fit_score(slots), val_score(slots);
  for (std::size_t s = 0; s < slots; ++s) {
    fit_score[s].assign(fit_rows.size(), model.base_scores[s]);
    val_score[s].assign(val_rows.size(), model.base_scores[s]);
  }

  std::vector<double> grads(fit_rows.size()), hess(fit_rows.size());
  std::vector<std::int32_t> leaf_of;
  EarlyStopping stopper(cfg.patience);
  for (int iter = 0; iter < cfg.n_trees; ++iter) {
    for (std::size_t s = 0; s < slots; ++s) {
      const auto& v = views[s];
      for (std::size_t i = 0; i < fit_rows.size(); ++i) {
        const auto r = fit_rows[i];
        const auto gp = distill::tree_gradient(fit_score[s][i], v.soft_logit[r], v.temperature[r], v.weight[r],
                                               v.label[r], loss.alpha);
        grads[i] = gp.grad;
        hess[i] = gp.hess;
      }
      Tree tree = detail::grow_tree(x_fit, index, grads, hess, cfg, leaf_of);
      for (std::size_t i = 0; i < fit_rows.size(); ++i)
        fit_score[s][i] += cfg.learning_rate * tree[static_cast<std::size_t>(leaf_of[i])].value;
      for (std::size_t i = 0; i < val_rows.size(); ++i)
        val_score[s][i] += cfg.learning_rate * predict_tree(tree, x_val.row(i));
      model.trees[s].push_back(std::move(tree));
    }
    if (!early_stop) continue;
    double val_loss = 0.0;
    for (std::size_t s = 0; s < slots; ++s) {
      const auto& v = views[s];
      for (std::size_t i = 0; i < val_rows.size(); ++i) {
        const auto r = val_rows[i];
        val_loss += distill::tree_loss(val_score[s][i], v.soft_logit[r], v.temperature[r], v.weight[r], v.label[r],
                                       loss.alpha);
      }
    }
    model.validation_loss.push_back(val_loss);
    if (stopper.update(val_loss)) break;
  }

  model.best_iteration = early_stop ? stopper.best_iteration() : static_cast<int>(model.trees.front().size());
  for (auto& slot_trees : model.trees) slot_trees.resize(static_cast<std::size_t>(model.best_iteration));
  return model;
}

BoostedModel fit_hard(const data::Dataset& train, const GbdtConfig& cfg) {
  distill::LossConfig hard;
  hard.alpha = 0.0;
  hard.fixed_temperature = 1.0;
  hard.confidence_weighting = false;
  return fit_distilled(train, distill::hard_targets(train.labels, train.class_count), hard, cfg);
}

}  // namespace distillforge::gbdt
