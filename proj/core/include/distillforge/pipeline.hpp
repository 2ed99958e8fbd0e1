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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "distillforge/bench.hpp"
#include "distillforge/dataset.hpp"
#include "distillforge/distill.hpp"
#include "distillforge/gbdt.hpp"
#include "distillforge/logreg.hpp"
#include "distillforge/metrics.hpp"
#include "distillforge/mlp.hpp"
#include "distillforge/teacher.hpp"
#include "distillforge/wilcoxon.hpp"

namespace distillforge::pipeline {

enum class StudentKind { gbdt, mlp, logreg };

StudentKind parse_student_kind(std::string_view name);
std::string to_string(StudentKind kind);

struct DatasetSource {
  std::filesystem::path csv;
  std::filesystem::path schema;
  std::optional<data::SynthConfig> synth;  // used when csv is empty
  std::size_t max_rows = 0;                // 0 keeps every row
  data::ImputeStrategy impute = data::ImputeStrategy::zero;
};

struct BenchSettings {
  bool enabled = true;
  bench::BenchConfig config;
};

struct RunConfig {
  DatasetSource dataset;
  int k_folds = 5;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  std::vector<teacher::TeacherSpec> teachers = {teacher::TeacherSpec{}};
  StudentKind student = StudentKind::gbdt;
  distill::LossConfig loss;
  gbdt::GbdtConfig gbdt;
  mlp::TrainSchedule mlp;
  baselines::LogRegConfig logreg;
  double test_fraction = 0.2;
  double calib_fraction = 0.15;
  BenchSettings bench;
  std::filesystem::path out = "runs";

  void validate() const;
  std::string to_json() const;
  static RunConfig from_json(std::string_view text);
  static RunConfig load(const std::filesystem::path& path);
};

// A trained student of any kind behind one interface.
struct Student {
  std::variant<gbdt::BoostedModel, mlp::MlpModel, baselines::LogRegModel> model;

  StudentKind kind() const;
  Matrix predict_proba(const Matrix& rows) const;
  // Scores whose softmax is predict_proba; used for temperature scaling.
  Matrix logits(const Matrix& rows) const;
  std::string serialize() const;
  static Student deserialize(std::string_view text);
};

// Trains the configured student. logreg ignores the targets.
Student train_student(const RunConfig& cfg, const data::Dataset& train, const distill::DistillTargets& targets,
                      const distill::LossConfig& loss, std::uint64_t seed);
// Hard-label reference trainer for the same student kind.
Student train_hard(const RunConfig& cfg, const data::Dataset& train, std::uint64_t seed);

gbdt::GbdtConfig seeded_gbdt(const RunConfig& cfg, std::uint64_t seed);
std::uint64_t mlp_seed(const RunConfig& cfg, std::uint64_t seed);
teacher::TeacherSpec seeded_teacher(const teacher::TeacherSpec& spec, std::uint64_t seed);

// Loaded (and subsampled, imputed) dataset for one seed.
data::Dataset load_dataset(const RunConfig& cfg, std::uint64_t seed);

std::filesystem::path seed_dir(const RunConfig& cfg, std::uint64_t seed);

// Materialised split for one seed, read back from split.json / folds.json.
struct SeedData {
  data::Dataset full;
  std::vector<std::size_t> train_rows, calib_rows, test_rows;
  data::Dataset train, calib, test;
  data::FoldAssignment folds;  // over train rows
};

SeedData load_seed_data(const RunConfig& cfg, std::uint64_t seed);

// Stages. Each reads its upstream artifacts from seed_dir and throws
// MissingArtifactError naming any that are absent.
void run_split(const RunConfig& cfg, std::uint64_t seed);
void run_teach(const RunConfig& cfg, std::uint64_t seed);
void run_distill(const RunConfig& cfg, std::uint64_t seed);

struct EvaluateOptions {
  std::optional<std::filesystem::path> soft_labels;  // foreign file to audit first
  bool allow_unaudited = false;
};

metrics::EvalReport run_evaluate(const RunConfig& cfg, std::uint64_t seed, const EvaluateOptions& options = {});
bench::LatencyReport run_bench(const RunConfig& cfg, std::uint64_t seed);

struct SeedFailure {
  std::uint64_t seed = 0;
  std::string stage;
  std::string error;
  int exit_code = 1;
};

struct MetricSummary {
  std::vector<double> values;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for fewer than 2 values
};

MetricSummary summarize(std::vector<double> values);

struct Aggregate {
  std::vector<std::uint64_t> completed;
  std::vector<SeedFailure> failed;
  std::vector<std::pair<std::string, MetricSummary>> metrics;  // stable order

  std::string to_json() const;
};

// Runs every stage for every seed and writes aggregate.json.
Aggregate cmd_pipeline(const RunConfig& cfg);

struct AblationVariant {
  std::string name;
  std::string label;
  distill::LossConfig loss;
  mlp::TrainSchedule mlp;
};

// The eight ablation configurations derived from cfg.
std::vector<AblationVariant> ablation_variants(const RunConfig& cfg);

struct AblationRow {
  std::string name;
  std::string label;
  std::vector<double> auc;     // per seed
  double mean_auc = 0.0;
  std::vector<double> delta;   // per seed, config minus full
  double mean_delta = 0.0;
  stats::WilcoxonResult test;
};

struct AblationTable {
  std::vector<std::uint64_t> seeds;
  std::vector<AblationRow> rows;

  std::string to_json() const;
  std::string to_text() const;
};

// Trains every variant on every seed's split and soft labels. Models go to
// <out>/ablate/<variant>/seed_<s>/model.json.
AblationTable cmd_ablate(const RunConfig& cfg);

}  // namespace distillforge::pipeline
