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

#include "distillforge/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "distillforge/error.hpp"
#include "distillforge/random.hpp"

namespace distillforge::pipeline {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Stream ids for derive_seed; one per randomised step of a run.
constexpr std::uint64_t kSubsampleStream = 11;
constexpr std::uint64_t kTestSplitStream = 12;
constexpr std::uint64_t kCalibSplitStream = 13;
constexpr std::uint64_t kFoldStream = 14;
constexpr std::uint64_t kGbdtStream = 15;
constexpr std::uint64_t kMlpStream = 16;
constexpr std::uint64_t kTeacherStream = 17;

std::string read_text(const fs::path& path, std::string_view produced_by) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw MissingArtifactError("missing artifact " + path.string() + " (produced by the " + std::string(produced_by) +
                               " stage)");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << text;
  if (!out) throw ValidationError("write failed for " + path.string());
}

std::string impute_name(data::ImputeStrategy s) { return s == data::ImputeStrategy::median ? "median" : "zero"; }

std::string spec_string(const teacher::TeacherSpec& s) {
  switch (s.kind) {
    case teacher::TeacherKind::file:
      return "file:" + s.path.string();
    case teacher::TeacherKind::bagged_tree:
      return "bagged:trees=" + std::to_string(s.trees) + ",depth=" + std::to_string(s.depth) +
             ",seed=" + std::to_string(s.seed);
    case teacher::TeacherKind::knn:
      break;
  }
  return s.knn_k ? "knn:k=" + std::to_string(s.knn_k) : "knn";
}

json json_of(const std::string& text) { return json::parse(text); }

int exit_code_of(const std::exception& e) {
  if (dynamic_cast<const LeakageError*>(&e) != nullptr) return 3;
  if (dynamic_cast<const ValidationError*>(&e) != nullptr) return 2;
  return 1;
}

// Mean of identical-shaped probability matrices, offset from the rowwise
// minimum so that averaging copies of one matrix reproduces it exactly.
Matrix mean_probs(const std::vector<Matrix>& parts) {
  Matrix out = parts.front();
  if (parts.size() == 1) return out;
  const double m = static_cast<double>(parts.size());
  for (std::size_t k = 0; k < out.data().size(); ++k) {
    double lo = parts.front().data()[k];
    for (const auto& p : parts) lo = std::min(lo, p.data()[k]);
    double acc = 0.0;
    for (const auto& p : parts) acc += p.data()[k] - lo;
    out.data()[k] = lo + acc / m;
  }
  return out;
}

std::vector<std::size_t> map_rows(const std::vector<std::size_t>& local, const std::vector<std::size_t>& global) {
  std::vector<std::size_t> out(local.size());
  for (std::size_t i = 0; i < local.size(); ++i) out[i] = global[local[i]];
  return out;
}

}  // namespace

StudentKind parse_student_kind(std::string_view name) {
  if (name == "gbdt") return StudentKind::gbdt;
  if (name == "mlp") return StudentKind::mlp;
  if (name == "logreg") return StudentKind::logreg;
  throw ValidationError("unknown student kind '" + std::string(name) + "' (expected gbdt, mlp or logreg)");
}

std::string to_string(StudentKind kind) {
  switch (kind) {
    case StudentKind::mlp:
      return "mlp";
    case StudentKind::logreg:
      return "logreg";
    case StudentKind::gbdt:
      break;
  }
  return "gbdt";
}

// ------------------------------------------------------------ config

void RunConfig::validate() const {
  if (dataset.csv.empty()) {
    if (!dataset.synth) throw ValidationError("config: dataset needs a csv path or a synth generator");
    dataset.synth->validate();
  } else if (dataset.schema.empty()) {
    throw ValidationError("config: csv dataset needs a schema path");
  }
  if (k_folds < 2) throw ValidationError("config: k_folds must be at least 2");
  if (seeds.empty()) throw ValidationError("config: at least one seed is required");
  if (teachers.empty()) throw ValidationError("config: at least one teacher is required");
  for (const auto& t : teachers) t.validate();
  loss.validate();
  gbdt.validate();
  mlp.validate();
  logreg.validate();
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ValidationError("config: test_fraction outside (0, 1)");
  if (!(calib_fraction >= 0.0 && calib_fraction < 1.0)) throw ValidationError("config: calib_fraction outside [0, 1)");
  if (bench.config.runs == 0) throw ValidationError("config: bench runs must be positive");
  if (out.empty()) throw ValidationError("config: output directory is empty");
}

std::string RunConfig::to_json() const {
  json ds = {{"max_rows", dataset.max_rows}, {"impute", impute_name(dataset.impute)}};
  if (!dataset.csv.empty()) {
    ds["csv"] = dataset.csv.string();
    ds["schema"] = dataset.schema.string();
  } else if (dataset.synth) {
    ds["synth"] = json_of(dataset.synth->to_json());
  }
  json t = json::array();
  for (const auto& spec : teachers) t.push_back(spec_string(spec));
  json j = {{"dataset", std::move(ds)},
            {"k_folds", k_folds},
            {"seeds", seeds},
            {"teachers", std::move(t)},
            {"student", to_string(student)},
            {"loss", json_of(loss.to_json())},
            {"gbdt", json_of(gbdt.to_json())},
            {"mlp", json_of(mlp.to_json())},
            {"logreg", json_of(logreg.to_json())},
            {"test_fraction", test_fraction},
            {"calib_fraction", calib_fraction},
            {"bench", {{"enabled", bench.enabled}, {"warmup", bench.config.warmup}, {"runs", bench.config.runs}}},
            {"out", out.string()}};
  return j.dump(2) + "\n";
}

RunConfig RunConfig::from_json(std::string_view text) {
  try {
    const auto j = json::parse(text);
    RunConfig c;
    if (j.contains("dataset")) {
      const auto& d = j.at("dataset");
      c.dataset.csv = d.value("csv", std::string{});
      c.dataset.schema = d.value("schema", std::string{});
      if (d.contains("synth")) c.dataset.synth = data::SynthConfig::from_json(d.at("synth").dump());
      else if (!c.dataset.csv.empty()) c.dataset.synth.reset();
      c.dataset.max_rows = d.value("max_rows", std::size_t{0});
      c.dataset.impute = data::parse_impute_strategy(d.value("impute", std::string("zero")));
    }
    c.k_folds = j.value("k_folds", c.k_folds);
    if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("teachers")) {
      c.teachers.clear();
      for (const auto& t : j.at("teachers")) {
        if (!t.is_string()) throw ValidationError("config: teachers must be spec strings such as \"knn:k=7\"");
        c.teachers.push_back(teacher::TeacherSpec::parse(t.get<std::string>()));
      }
    }
    if (j.contains("student")) c.student = parse_student_kind(j.at("student").get<std::string>());
    if (j.contains("loss")) c.loss = distill::LossConfig::from_json(j.at("loss").dump());
    if (j.contains("gbdt")) c.gbdt = gbdt::GbdtConfig::from_json(j.at("gbdt").dump());
    if (j.contains("mlp")) c.mlp = mlp::TrainSchedule::from_json(j.at("mlp").dump());
    if (j.contains("logreg")) c.logreg = baselines::LogRegConfig::from_json(j.at("logreg").dump());
    c.test_fraction = j.value("test_fraction", c.test_fraction);
    c.calib_fraction = j.value("calib_fraction", c.calib_fraction);
    if (j.contains("bench")) {
      const auto& b = j.at("bench");
      c.bench.enabled = b.value("enabled", c.bench.enabled);
      c.bench.config.warmup = b.value("warmup", c.bench.config.warmup);
      c.bench.config.runs = b.value("runs", c.bench.config.runs);
    }
    c.out = j.value("out", c.out.string());
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
}

RunConfig RunConfig::load(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

// ------------------------------------------------------------ students

StudentKind Student::kind() const {
  switch (model.index()) {
    case 1:
      return StudentKind::mlp;
    case 2:
      return StudentKind::logreg;
    default:
      return StudentKind::gbdt;
  }
}

Matrix Student::predict_proba(const Matrix& rows) const {
  return std::visit([&](const auto& m) { return m.predict_proba(rows); }, model);
}

namespace {

// Two-class scores s become logits (0, s).
Matrix binary_logits(const Matrix& scores) {
  Matrix out(scores.rows(), 2);
  for (std::size_t i = 0; i < scores.rows(); ++i) out(i, 1) = scores(i, 0);
  return out;
}

}  // namespace

Matrix Student::logits(const Matrix& rows) const {
  if (const auto* g = std::get_if<gbdt::BoostedModel>(&model)) {
    if (g->class_count == 2) return binary_logits(g->raw_scores(rows));
    return metrics::log_probs(g->predict_proba(rows));
  }
  if (const auto* m = std::get_if<mlp::MlpModel>(&model)) return m->logits(rows);
  const auto& l = std::get<baselines::LogRegModel>(model);
  return l.class_count == 2 ? binary_logits(l.scores(rows)) : l.scores(rows);
}

std::string Student::serialize() const {
  return std::visit([](const auto& m) { return m.serialize(); }, model);
}

Student Student::deserialize(std::string_view text) {
  std::string format;
  try {
    format = json::parse(text).at("format").get<std::string>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("model file: ") + e.what());
  }
  if (format == "distillforge-gbdt") return {gbdt::BoostedModel::deserialize(text)};
  if (format == "distillforge-mlp") return {mlp::MlpModel::deserialize(text)};
  if (format == "distillforge-logreg") return {baselines::LogRegModel::deserialize(text)};
  throw ValidationError("model file: unknown format '" + format + "'");
}

gbdt::GbdtConfig seeded_gbdt(const RunConfig& cfg, std::uint64_t seed) {
  gbdt::GbdtConfig c = cfg.gbdt;
  c.seed = derive_seed(derive_seed(seed, kGbdtStream), cfg.gbdt.seed);
  return c;
}

std::uint64_t mlp_seed(const RunConfig&, std::uint64_t seed) { return derive_seed(seed, kMlpStream); }

teacher::TeacherSpec seeded_teacher(const teacher::TeacherSpec& spec, std::uint64_t seed) {
  teacher::TeacherSpec s = spec;
  if (s.kind == teacher::TeacherKind::file) {
    auto p = s.path.string();
    const auto at = p.find("{seed}");
    if (at != std::string::npos) p.replace(at, 6, std::to_string(seed));
    s.path = p;
  } else {
    s.seed = derive_seed(derive_seed(seed, kTeacherStream), spec.seed);
  }
  return s;
}

Student train_student(const RunConfig& cfg, const data::Dataset& train, const distill::DistillTargets& targets,
                      const distill::LossConfig& loss, std::uint64_t seed) {
  switch (cfg.student) {
    case StudentKind::mlp:
      return {mlp::fit_mlp(train, targets, cfg.mlp, loss, mlp_seed(cfg, seed))};
    case StudentKind::logreg:
      return {baselines::fit_logreg(train, cfg.logreg)};
    case StudentKind::gbdt:
      break;
  }
  return {gbdt::fit_distilled(train, targets, loss, seeded_gbdt(cfg, seed))};
}

Student train_hard(const RunConfig& cfg, const data::Dataset& train, std::uint64_t seed) {
  switch (cfg.student) {
    case StudentKind::mlp:
      return {mlp::fit_mlp_hard(train, cfg.mlp, mlp_seed(cfg, seed))};
    case StudentKind::logreg:
      return {baselines::fit_logreg(train, cfg.logreg)};
    case StudentKind::gbdt:
      break;
  }
  return {gbdt::fit_hard(train, seeded_gbdt(cfg, seed))};
}

// ------------------------------------------------------------ data

data::Dataset load_dataset(const RunConfig& cfg, std::uint64_t seed) {
  data::Dataset ds;
  if (!cfg.dataset.csv.empty()) {
    ds = data::load_csv(cfg.dataset.csv, cfg.dataset.schema);
  } else {
    if (!cfg.dataset.synth) throw ValidationError("config: no dataset source");
    data::SynthConfig s = *cfg.dataset.synth;
    s.seed += seed;
    ds = data::synth_generate(s);
  }
  if (cfg.dataset.max_rows > 0 && ds.rows() > cfg.dataset.max_rows)
    ds = data::stratified_subsample(ds, cfg.dataset.max_rows, derive_seed(seed, kSubsampleStream));
  return data::impute(ds, cfg.dataset.impute);
}

fs::path seed_dir(const RunConfig& cfg, std::uint64_t seed) { return cfg.out / ("seed_" + std::to_string(seed)); }

void run_split(const RunConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const auto ds = load_dataset(cfg, seed);
  const auto outer = data::stratified_split_indices(ds.labels, ds.class_count, cfg.test_fraction,
                                                    derive_seed(seed, kTestSplitStream));
  std::vector<std::size_t> train_rows = outer.train, calib_rows;
  if (cfg.calib_fraction > 0.0) {
    std::vector<int> labels(outer.train.size());
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = ds.labels[outer.train[i]];
    const auto inner = data::stratified_split_indices(labels, ds.class_count, cfg.calib_fraction,
                                                      derive_seed(seed, kCalibSplitStream));
    train_rows = map_rows(inner.train, outer.train);
    calib_rows = map_rows(inner.test, outer.train);
  }
  std::vector<int> train_labels(train_rows.size());
  for (std::size_t i = 0; i < train_rows.size(); ++i) train_labels[i] = ds.labels[train_rows[i]];
  const auto folds = data::stratified_kfold(train_labels, ds.class_count, cfg.k_folds, derive_seed(seed, kFoldStream));

  const json split = {{"seed", seed},
                      {"rows", ds.rows()},
                      {"test_fraction", cfg.test_fraction},
                      {"calib_fraction", cfg.calib_fraction},
                      {"train", train_rows},
                      {"calib", calib_rows},
                      {"test", outer.test}};
  const auto dir = seed_dir(cfg, seed);
  write_text(dir / "split.json", split.dump() + "\n");
  write_text(dir / "folds.json", folds.to_json());
}

SeedData load_seed_data(const RunConfig& cfg, std::uint64_t seed) {
  const auto dir = seed_dir(cfg, seed);
  const auto split_text = read_text(dir / "split.json", "split");
  const auto folds_text = read_text(dir / "folds.json", "split");
  SeedData sd;
  sd.full = load_dataset(cfg, seed);
  try {
    const auto j = json::parse(split_text);
    if (j.at("rows").get<std::size_t>() != sd.full.rows())
      throw ValidationError("split.json was written for a dataset with a different row count");
    sd.train_rows = j.at("train").get<std::vector<std::size_t>>();
    sd.calib_rows = j.at("calib").get<std::vector<std::size_t>>();
    sd.test_rows = j.at("test").get<std::vector<std::size_t>>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("split.json: ") + e.what());
  }
  for (const auto* rows : {&sd.train_rows, &sd.calib_rows, &sd.test_rows})
    for (auto r : *rows)
      if (r >= sd.full.rows()) throw ValidationError("split.json: row index out of range");
  sd.train = sd.full.subset(sd.train_rows);
  sd.calib = sd.full.subset(sd.calib_rows);
  sd.test = sd.full.subset(sd.test_rows);
  sd.folds = data::FoldAssignment::from_json(folds_text);
  if (sd.folds.rows() != sd.train.rows()) throw ValidationError("folds.json does not cover the training rows");
  return sd;
}

// ------------------------------------------------------------ stages

void run_teach(const RunConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const auto sd = load_seed_data(cfg, seed);
  std::vector<teacher::SoftLabelSet> sets;
  std::vector<Matrix> test_probs;
  bool all_in_process = true;
  for (const auto& spec : cfg.teachers) {
    const auto s = seeded_teacher(spec, seed);
    sets.push_back(teacher::oof_label(sd.train, sd.folds, s));
    if (s.kind == teacher::TeacherKind::file) {
      all_in_process = false;
    } else if (all_in_process) {
      test_probs.push_back(teacher::fit_teacher(s, sd.train)->predict_proba(sd.test.features));
    }
  }
  const auto soft = sets.size() == 1 ? sets.front() : teacher::average_teachers(sets);
  const auto audit = teacher::leakage_audit(soft);
  if (!audit.passed)
    throw LeakageError("leakage audit failed: " + std::to_string(audit.offending_rows.size()) +
                       " rows were scored by a teacher fitted on them");

  json info = {{"teacher_id", soft.teacher_id}, {"teachers", sets.size()}, {"test_auc", nullptr}};
  if (all_in_process) info["test_auc"] = metrics::task_auc(mean_probs(test_probs), sd.test.labels);
  const auto dir = seed_dir(cfg, seed);
  teacher::export_soft_labels(soft, dir / "softlabels.csv");
  write_text(dir / "teacher.json", info.dump(2) + "\n");
}

namespace {

teacher::SoftLabelSet load_soft_labels(const RunConfig& cfg, std::uint64_t seed, const SeedData& sd) {
  const auto path = seed_dir(cfg, seed) / "softlabels.csv";
  if (!fs::exists(path)) throw MissingArtifactError("missing artifact " + path.string() + " (produced by the teach stage)");
  auto soft = teacher::import_soft_labels(path, sd.train, sd.folds);
  const auto audit = teacher::leakage_audit(soft);
  if (!audit.passed) throw LeakageError("leakage audit failed on " + path.string());
  return soft;
}

}  // namespace

void run_distill(const RunConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const auto sd = load_seed_data(cfg, seed);
  const auto soft = load_soft_labels(cfg, seed, sd);
  const auto targets = distill::build_targets(soft, sd.train.labels, cfg.loss);
  const auto student = train_student(cfg, sd.train, targets, cfg.loss, seed);
  write_text(seed_dir(cfg, seed) / "model.json", student.serialize());
}

metrics::EvalReport run_evaluate(const RunConfig& cfg, std::uint64_t seed, const EvaluateOptions& options) {
  cfg.validate();
  const auto sd = load_seed_data(cfg, seed);
  const auto dir = seed_dir(cfg, seed);
  if (options.soft_labels) {
    const auto foreign =
        teacher::import_soft_labels(*options.soft_labels, sd.train, sd.folds, teacher::FoldCheck::provenance);
    const auto audit = teacher::leakage_audit(foreign);
    if (!audit.passed && !options.allow_unaudited)
      throw LeakageError("leakage audit failed on " + options.soft_labels->string() + ": " +
                         std::to_string(audit.offending_rows.size()) +
                         " rows were labelled outside their assigned fold (pass --allow-unaudited to override)");
  }
  const auto student = Student::deserialize(read_text(dir / "model.json", "distill"));
  std::optional<double> teacher_auc;
  if (fs::exists(dir / "teacher.json")) {
    const auto j = json::parse(read_text(dir / "teacher.json", "teach"));
    if (!j.at("test_auc").is_null()) teacher_auc = j.at("test_auc").get<double>();
  }
  metrics::EvalInput input;
  input.test_logits = student.logits(sd.test.features);
  input.test_labels = sd.test.labels;
  input.sensitive = sd.test.sensitive;
  input.calib_logits = student.logits(sd.calib.features);
  input.calib_labels = sd.calib.labels;
  input.teacher_auc = teacher_auc;
  const auto report = metrics::evaluate(input);
  write_text(dir / "report.json", report.to_json());
  return report;
}

bench::LatencyReport run_bench(const RunConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const auto dir = seed_dir(cfg, seed);
  const auto text = read_text(dir / "model.json", "distill");
  const auto student = Student::deserialize(text);
  const auto ds = load_dataset(cfg, seed);
  const auto report = bench::measure([&](const Matrix& rows) { return student.predict_proba(rows); }, ds.features,
                                     text.size(), cfg.bench.config);
  write_text(dir / "latency.json", report.to_json());
  return report;
}

// ------------------------------------------------------------ aggregate

MetricSummary summarize(std::vector<double> values) {
  MetricSummary s;
  s.values = std::move(values);
  if (s.values.empty()) return s;
  const double n = static_cast<double>(s.values.size());
  s.mean = std::accumulate(s.values.begin(), s.values.end(), 0.0) / n;
  if (s.values.size() > 1) {
    double ss = 0.0;
    for (double v : s.values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

std::string Aggregate::to_json() const {
  json fails = json::array();
  for (const auto& f : failed)
    fails.push_back({{"seed", f.seed}, {"stage", f.stage}, {"error", f.error}, {"exit_code", f.exit_code}});
  json m = json::object();
  for (const auto& [name, s] : metrics) m[name] = {{"values", s.values}, {"mean", s.mean}, {"std", s.std}};
  return json{{"completed", completed}, {"failed", std::move(fails)}, {"metrics", std::move(m)}}.dump(2) + "\n";
}

Aggregate cmd_pipeline(const RunConfig& cfg) {
  cfg.validate();
  write_text(cfg.out / "config.json", cfg.to_json());
  Aggregate agg;
  std::vector<metrics::EvalReport> reports;
  std::vector<std::optional<double>> teacher_aucs;
  for (auto seed : cfg.seeds) {
    std::string stage = "split";
    try {
      run_split(cfg, seed);
      stage = "teach";
      run_teach(cfg, seed);
      stage = "distill";
      run_distill(cfg, seed);
      stage = "evaluate";
      reports.push_back(run_evaluate(cfg, seed));
      if (cfg.bench.enabled) {
        stage = "bench";
        run_bench(cfg, seed);
      }
      agg.completed.push_back(seed);
    } catch (const std::exception& e) {
      if (reports.size() > agg.completed.size()) reports.pop_back();
      agg.failed.push_back({seed, stage, e.what(), exit_code_of(e)});
    }
  }

  auto collect = [&](const std::string& name, auto get) {
    std::vector<double> v;
    for (const auto& r : reports) {
      const std::optional<double> x = get(r);
      if (!x) return;
      v.push_back(*x);
    }
    if (!v.empty()) agg.metrics.emplace_back(name, summarize(std::move(v)));
  };
  using R = metrics::EvalReport;
  collect("auc", [](const R& r) { return std::optional<double>(r.auc); });
  collect("retention_pct", [](const R& r) { return r.retention_pct; });
  collect("ece", [](const R& r) { return std::optional<double>(r.ece); });
  collect("brier", [](const R& r) { return std::optional<double>(r.brier); });
  collect("ece_ts", [](const R& r) { return std::optional<double>(r.ece_ts); });
  collect("brier_ts", [](const R& r) { return std::optional<double>(r.brier_ts); });
  collect("fitted_temperature", [](const R& r) { return std::optional<double>(r.fitted_temperature); });
  if (!reports.empty()) {
    for (const auto& [attr, v] : reports.front().dp_diff) {
      collect("dp_diff." + attr, [&](const R& r) {
        auto it = r.dp_diff.find(attr);
        return it == r.dp_diff.end() ? std::nullopt : std::optional<double>(it->second);
      });
      collect("eo_diff." + attr, [&](const R& r) {
        auto it = r.eo_diff.find(attr);
        return it == r.eo_diff.end() ? std::nullopt : std::optional<double>(it->second);
      });
    }
  }
  write_text(cfg.out / "aggregate.json", agg.to_json());
  return agg;
}

// ------------------------------------------------------------ ablation

std::vector<AblationVariant> ablation_variants(const RunConfig& cfg) {
  std::vector<AblationVariant> v;
  auto add = [&](std::string name, std::string label) -> AblationVariant& {
    v.push_back({std::move(name), std::move(label), cfg.loss, cfg.mlp});
    return v.back();
  };
  add("full", "Full (all components)");
  add("no_adaptive_temperature", "No adaptive temperature").loss.fixed_temperature =
      0.5 * (cfg.loss.t_min + cfg.loss.t_max);
  add("no_confidence_weighting", "No confidence weighting").loss.confidence_weighting = false;
  add("no_augmentation", "No augmentation").mlp.augment_sigma = 0.0;
  {
    // Hard labels only: no soft term and no entropy weights on the CE term.
    auto& hard = add("hard_only", "Hard labels only (alpha=0)");
    hard.loss.alpha = 0.0;
    hard.loss.fixed_temperature = 1.0;
    hard.loss.confidence_weighting = false;
  }
  add("soft_only", "Soft labels only (alpha=1)").loss.alpha = 1.0;
  add("fixed_t1", "Fixed temperature (T=1)").loss.fixed_temperature = 1.0;
  add("fixed_t5", "High temperature (T=5)").loss.fixed_temperature = 5.0;
  return v;
}

std::string AblationTable::to_json() const {
  json rows_j = json::array();
  for (const auto& r : rows) {
    rows_j.push_back({{"name", r.name},
                      {"label", r.label},
                      {"auc", r.auc},
                      {"mean_auc", r.mean_auc},
                      {"delta", r.delta},
                      {"mean_delta", r.mean_delta},
                      {"wilcoxon_w_plus", r.test.w_plus},
                      {"p_value", r.test.p_value ? json(*r.test.p_value) : json("n/a")},
                      {"exact", r.test.exact}});
  }
  return json{{"seeds", seeds}, {"rows", std::move(rows_j)}}.dump(2) + "\n";
}

std::string AblationTable::to_text() const {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-32s  %9s  %9s  %8s\n", "Configuration", "Mean AUC", "Delta", "p");
  out += buf;
  out += std::string(32 + 2 + 9 + 2 + 9 + 2 + 8, '-') + "\n";
  for (const auto& r : rows) {
    char p[32];
    if (r.test.p_value) std::snprintf(p, sizeof p, "%8.4f", *r.test.p_value);
    else std::snprintf(p, sizeof p, "%8s", "n/a");
    std::snprintf(buf, sizeof buf, "%-32s  %9.4f  %+9.4f  %s\n", r.label.c_str(), r.mean_auc, r.mean_delta, p);
    out += buf;
  }
  return out;
}

AblationTable cmd_ablate(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.student == StudentKind::logreg)
    throw ValidationError("ablate: the logreg baseline has no distillation components; use gbdt or mlp");
  const auto variants = ablation_variants(cfg);
  AblationTable table;
  table.seeds = cfg.seeds;
  for (const auto& v : variants) table.rows.push_back({v.name, v.label, {}, 0.0, {}, 0.0, {}});

  for (auto seed : cfg.seeds) {
    run_split(cfg, seed);
    run_teach(cfg, seed);
    const auto sd = load_seed_data(cfg, seed);
    const auto soft = load_soft_labels(cfg, seed, sd);
    for (std::size_t k = 0; k < variants.size(); ++k) {
      RunConfig vc = cfg;
      vc.loss = variants[k].loss;
      vc.mlp = variants[k].mlp;
      const auto targets = distill::build_targets(soft, sd.train.labels, vc.loss);
      const auto student = train_student(vc, sd.train, targets, vc.loss, seed);
      write_text(cfg.out / "ablate" / variants[k].name / ("seed_" + std::to_string(seed)) / "model.json",
                 student.serialize());
      table.rows[k].auc.push_back(metrics::task_auc(student.predict_proba(sd.test.features), sd.test.labels));
    }
  }

  const auto& full = table.rows.front().auc;
  for (auto& r : table.rows) {
    r.mean_auc = summarize(r.auc).mean;
    r.delta.resize(r.auc.size());
    for (std::size_t i = 0; i < r.auc.size(); ++i) r.delta[i] = r.auc[i] - full[i];
    r.mean_delta = summarize(r.delta).mean;
    r.test = stats::wilcoxon_signed_rank(r.delta);
  }
  // Full against itself: zero deltas, p = 1 by convention.
  table.rows.front().test.p_value = 1.0;
  write_text(cfg.out / "ablation.json", table.to_json());
  write_text(cfg.out / "ablation.txt", table.to_text());
  return table;
}

}  // namespace distillforge::pipeline
