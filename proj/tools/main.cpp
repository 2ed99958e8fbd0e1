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

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "distillforge/error.hpp"
#include "distillforge/pipeline.hpp"

namespace df = distillforge;
namespace pl = distillforge::pipeline;

namespace {

struct Overrides {
  std::string config;
  std::optional<int> k_folds;
  std::optional<double> alpha, t_min, t_max, mu, sigma;
  std::optional<std::string> student;
  std::vector<std::string> teachers;
  std::optional<std::string> seeds;
  std::optional<std::string> out;
  std::optional<std::size_t> max_rows;
};

void add_run_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON run configuration");
  cmd->add_option("--k-folds", o.k_folds, "Number of out-of-fold teacher folds");
  cmd->add_option("--alpha", o.alpha, "Weight of the soft-label term");
  cmd->add_option("--t-min", o.t_min, "Temperature for confident teacher rows");
  cmd->add_option("--t-max", o.t_max, "Temperature for maximum-entropy teacher rows");
  cmd->add_option("--mu", o.mu, "Centre of the confidence weight");
  cmd->add_option("--sigma", o.sigma, "Width of the confidence weight");
  cmd->add_option("--student", o.student, "gbdt, mlp or logreg");
  cmd->add_option("--teacher", o.teachers, "knn[:k=N] | bagged[:trees=N,depth=N,seed=N] | file:PATH (repeatable)");
  cmd->add_option("--seeds", o.seeds, "Comma-separated seed list");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--max-rows", o.max_rows, "Stratified subsample cap");
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      seeds.push_back(std::stoull(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw df::ValidationError("--seeds: '" + item + "' is not a non-negative integer");
    }
  }
  if (seeds.empty()) throw df::ValidationError("--seeds: empty list");
  return seeds;
}

pl::RunConfig resolve(const Overrides& o) {
  pl::RunConfig cfg = o.config.empty() ? pl::RunConfig{} : pl::RunConfig::load(o.config);
  if (cfg.dataset.csv.empty() && !cfg.dataset.synth) cfg.dataset.synth = df::data::SynthConfig{};
  if (o.k_folds) cfg.k_folds = *o.k_folds;
  if (o.alpha) cfg.loss.alpha = *o.alpha;
  if (o.t_min) cfg.loss.t_min = *o.t_min;
  if (o.t_max) cfg.loss.t_max = *o.t_max;
  if (o.mu) cfg.loss.mu = *o.mu;
  if (o.sigma) cfg.loss.sigma = *o.sigma;
  if (o.student) cfg.student = pl::parse_student_kind(*o.student);
  if (!o.teachers.empty()) {
    cfg.teachers.clear();
    for (const auto& t : o.teachers) cfg.teachers.push_back(df::teacher::TeacherSpec::parse(t));
  }
  if (o.seeds) cfg.seeds = parse_seeds(*o.seeds);
  if (o.out) cfg.out = *o.out;
  if (o.max_rows) cfg.dataset.max_rows = *o.max_rows;
  cfg.validate();
  return cfg;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const df::LeakageError*>(&e) != nullptr) return 3;
  if (dynamic_cast<const df::ValidationError*>(&e) != nullptr) return 2;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Leakage-aware out-of-fold distillation of tabular teachers into fast students"};
  app.require_subcommand(1);

  Overrides o;
  df::data::SynthConfig synth;
  std::string synth_csv = "synth.csv", synth_schema = "synth.schema.json";
  auto* c_synth = app.add_subcommand("synth", "Write a synthetic dataset as CSV plus schema");
  c_synth->add_option("--n", synth.n, "Rows");
  c_synth->add_option("--d", synth.d, "Features");
  c_synth->add_option("--classes", synth.classes, "Classes");
  c_synth->add_option("--cluster-sep", synth.cluster_sep, "Centroid scale");
  c_synth->add_option("--label-noise", synth.label_noise, "Label flip probability");
  c_synth->add_option("--group-bias", synth.group_bias, "Correlation of the sensitive group with feature 0");
  c_synth->add_option("--seed", synth.seed, "Generator seed");
  c_synth->add_option("--csv", synth_csv, "Output CSV path");
  c_synth->add_option("--schema", synth_schema, "Output schema path");

  auto* c_split = app.add_subcommand("split", "Write split.json and folds.json per seed");
  auto* c_teach = app.add_subcommand("teach", "Out-of-fold teacher labelling per seed");
  auto* c_distill = app.add_subcommand("distill", "Train the student on persisted soft labels");
  auto* c_eval = app.add_subcommand("evaluate", "Evaluate the persisted student");
  auto* c_bench = app.add_subcommand("bench", "Latency and throughput of the persisted student");
  auto* c_pipe = app.add_subcommand("pipeline", "Run every stage for every seed and aggregate");
  auto* c_ablate = app.add_subcommand("ablate", "Run the eight-configuration ablation grid");
  for (auto* c : {c_split, c_teach, c_distill, c_eval, c_bench, c_pipe, c_ablate}) add_run_options(c, o);

  std::string foreign;
  bool allow_unaudited = false;
  c_eval->add_option("--soft-labels", foreign, "Foreign soft-label file to audit before evaluating");
  c_eval->add_flag("--allow-unaudited", allow_unaudited, "Evaluate even when the leakage audit fails");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (c_synth->parsed()) {
      const auto ds = df::data::synth_generate(synth);
      df::data::write_csv(ds, synth_csv, synth_schema);
      std::printf("wrote %zu rows to %s\n", ds.rows(), synth_csv.c_str());
      return 0;
    }
    const auto cfg = resolve(o);
    auto each_seed = [&](auto fn) {
      for (auto seed : cfg.seeds) fn(seed);
    };
    if (c_split->parsed()) each_seed([&](auto s) { pl::run_split(cfg, s); });
    if (c_teach->parsed()) each_seed([&](auto s) { pl::run_teach(cfg, s); });
    if (c_distill->parsed()) each_seed([&](auto s) { pl::run_distill(cfg, s); });
    if (c_eval->parsed()) {
      pl::EvaluateOptions opts;
      if (!foreign.empty()) opts.soft_labels = foreign;
      opts.allow_unaudited = allow_unaudited;
      each_seed([&](auto s) {
        const auto r = pl::run_evaluate(cfg, s, opts);
        std::printf("seed %llu: auc %.4f  ece %.4f -> %.4f (T=%.3f)\n", static_cast<unsigned long long>(s), r.auc,
                    r.ece, r.ece_ts, r.fitted_temperature);
      });
    }
    if (c_bench->parsed()) {
      std::vector<std::pair<std::string, df::bench::LatencyReport>> rows;
      each_seed([&](auto s) {
        rows.emplace_back(pl::to_string(cfg.student) + " seed " + std::to_string(s), pl::run_bench(cfg, s));
      });
      std::fputs(df::bench::format_table(rows).c_str(), stdout);
    }
    if (c_pipe->parsed()) {
      const auto agg = pl::cmd_pipeline(cfg);
      for (const auto& [name, s] : agg.metrics) std::printf("%-22s %.4f +- %.4f\n", name.c_str(), s.mean, s.std);
      for (const auto& f : agg.failed)
        std::fprintf(stderr, "seed %llu failed in %s: %s\n", static_cast<unsigned long long>(f.seed), f.stage.c_str(),
                     f.error.c_str());
      if (!agg.failed.empty()) return agg.failed.front().exit_code;
    }
    if (c_ablate->parsed()) std::fputs(pl::cmd_ablate(cfg).to_text().c_str(), stdout);
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  }
}
