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

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "distillforge/error.hpp"
#include "distillforge/pipeline.hpp"

using namespace distillforge;
using namespace distillforge::pipeline;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("distillforge_test_pipeline_" + name);
  fs::remove_all(dir);
  return dir;
}

RunConfig small_config(const std::string& name) {
  RunConfig cfg;
  data::SynthConfig synth;
  synth.n = 300;
  synth.d = 5;
  synth.label_noise = 0.1;
  synth.seed = 3;
  cfg.dataset.synth = synth;
  cfg.k_folds = 3;
  cfg.seeds = {0, 1};
  cfg.teachers = {teacher::TeacherSpec::parse("bagged:trees=10,depth=4")};
  cfg.gbdt.n_trees = 30;
  cfg.mlp.epochs = 5;
  cfg.bench.config = {1, 3};
  cfg.out = scratch(name);
  return cfg;
}

// Relative path -> contents for every file under root except latency.json.
std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file() || e.path().filename() == "latency.json") continue;
    out[fs::relative(e.path(), root).string()] = slurp(e.path());
  }
  return out;
}

}  // namespace

TEST_CASE("config json round trip and validation") {
  auto cfg = small_config("config");
  cfg.student = StudentKind::mlp;
  const auto back = RunConfig::from_json(cfg.to_json());
  CHECK(back.to_json() == cfg.to_json());
  CHECK(parse_student_kind("logreg") == StudentKind::logreg);
  CHECK_THROWS_AS(parse_student_kind("forest"), ValidationError);
  cfg.k_folds = 1;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("summarize uses the sample standard deviation") {
  const auto s = summarize({1.0, 2.0, 3.0, 4.0});
  CHECK(s.mean == 2.5);
  CHECK(s.std == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(summarize({7.0}).std == 0.0);
}

TEST_CASE("split is reproducible from the seed") {
  auto cfg = small_config("split");
  run_split(cfg, 4);
  const auto a = slurp(seed_dir(cfg, 4) / "folds.json");
  const auto s = slurp(seed_dir(cfg, 4) / "split.json");
  fs::remove_all(cfg.out);
  run_split(cfg, 4);
  CHECK(slurp(seed_dir(cfg, 4) / "folds.json") == a);
  CHECK(slurp(seed_dir(cfg, 4) / "split.json") == s);
  const auto data = load_seed_data(cfg, 4);
  CHECK(data.train_rows.size() + data.calib_rows.size() + data.test_rows.size() == 300);
  CHECK(data.folds.rows() == data.train.rows());
  fs::remove_all(cfg.out);
}

TEST_CASE("missing upstream artifacts are named") {
  auto cfg = small_config("missing");
  CHECK_THROWS_AS(run_teach(cfg, 0), MissingArtifactError);
  run_split(cfg, 0);
  CHECK_THROWS_AS(run_distill(cfg, 0), MissingArtifactError);
  try {
    run_evaluate(cfg, 0);
    FAIL("expected an error");
  } catch (const MissingArtifactError& e) {
    CHECK(std::string(e.what()).find("model.json") != std::string::npos);
  }
  fs::remove_all(cfg.out);
}

TEST_CASE("stage-wise runs equal the end-to-end pipeline") {
  auto a = small_config("stagewise_a");
  auto b = small_config("stagewise_b");
  const auto agg = cmd_pipeline(a);
  CHECK(agg.completed.size() == 2);
  CHECK(agg.failed.empty());
  fs::create_directories(b.out);
  std::ofstream(b.out / "config.json", std::ios::binary) << b.to_json();
  for (auto seed : b.seeds) {
    run_split(b, seed);
    run_teach(b, seed);
    run_distill(b, seed);
    run_evaluate(b, seed);
  }
  auto ta = tree(a.out), tb = tree(b.out);
  ta.erase("aggregate.json");
  ta.erase("config.json");
  tb.erase("config.json");
  CHECK(ta == tb);
  for (const auto& [path, text] : ta) CHECK_MESSAGE(tb[path] == text, path);
  CHECK(fs::exists(a.out / "seed_0" / "latency.json"));

  // Aggregate statistics are recomputable from the per-seed reports.
  std::vector<double> aucs;
  for (auto seed : a.seeds)
    aucs.push_back(metrics::EvalReport::from_json(slurp(seed_dir(a, seed) / "report.json")).auc);
  const auto j = nlohmann::json::parse(slurp(a.out / "aggregate.json"));
  const auto recomputed = summarize(aucs);
  CHECK(j["metrics"]["auc"]["mean"].get<double>() == recomputed.mean);
  CHECK(j["metrics"]["auc"]["std"].get<double>() == recomputed.std);
  fs::remove_all(a.out);
  fs::remove_all(b.out);
}

TEST_CASE("pipeline output is deterministic") {
  for (auto kind : {StudentKind::gbdt, StudentKind::mlp, StudentKind::logreg}) {
    auto a = small_config("det_a");
    auto b = small_config("det_b");
    a.student = b.student = kind;
    a.seeds = b.seeds = {5};
    cmd_pipeline(a);
    cmd_pipeline(b);
    auto ta = tree(a.out), tb = tree(b.out);
    ta.erase("config.json");
    tb.erase("config.json");
    CHECK_MESSAGE(ta == tb, to_string(kind));
    fs::remove_all(a.out);
    fs::remove_all(b.out);
  }
}

TEST_CASE("evaluate audits foreign soft labels") {
  auto cfg = small_config("foreign");
  cfg.seeds = {0};
  cmd_pipeline(cfg);
  const auto dir = seed_dir(cfg, 0);
  // Same labels with every fold id shifted: provenance contradicts the folds.
  std::istringstream in(slurp(dir / "softlabels.csv"));
  std::string line, out;
  std::getline(in, line);
  out = line + "\n";
  while (std::getline(in, line)) {
    const auto a = line.find(',');
    const auto b = line.find(',', a + 1);
    const int fold = std::stoi(line.substr(a + 1, b - a - 1));
    out += line.substr(0, a + 1) + std::to_string((fold + 1) % cfg.k_folds) + line.substr(b) + "\n";
  }
  const auto foreign = cfg.out / "foreign.csv";
  std::ofstream(foreign, std::ios::binary) << out;
  EvaluateOptions opts;
  opts.soft_labels = foreign;
  CHECK_THROWS_AS(run_evaluate(cfg, 0, opts), LeakageError);
  opts.allow_unaudited = true;
  CHECK_NOTHROW(run_evaluate(cfg, 0, opts));
  EvaluateOptions clean;
  clean.soft_labels = dir / "softlabels.csv";
  CHECK_NOTHROW(run_evaluate(cfg, 0, clean));
  fs::remove_all(cfg.out);
}

TEST_CASE("student serialisation dispatches on format") {
  auto cfg = small_config("student");
  const auto data = load_seed_data([&] {
    run_split(cfg, 0);
    return cfg;
  }(), 0);
  for (auto kind : {StudentKind::gbdt, StudentKind::mlp, StudentKind::logreg}) {
    cfg.student = kind;
    const auto s = train_hard(cfg, data.train, 0);
    CHECK(s.kind() == kind);
    const auto back = Student::deserialize(s.serialize());
    CHECK(back.kind() == kind);
    CHECK(back.predict_proba(data.test.features) == s.predict_proba(data.test.features));
    // Softmax of logits reproduces the probabilities.
    const auto z = s.logits(data.test.features);
    const auto p = s.predict_proba(data.test.features);
    for (std::size_t i = 0; i < z.rows(); ++i) {
      std::vector<double> q(z.cols());
      distill::softmax_at(z.row(i), 1.0, q);
      for (std::size_t c = 0; c < q.size(); ++c) CHECK(q[c] == doctest::Approx(p(i, c)).epsilon(1e-6));
    }
  }
  CHECK_THROWS_AS(Student::deserialize("{\"format\":\"nope\"}"), ValidationError);
  fs::remove_all(cfg.out);
}

TEST_CASE("ablation grid") {
  auto cfg = small_config("ablate");
  const auto variants = ablation_variants(cfg);
  REQUIRE(variants.size() == 8);
  CHECK(variants[0].name == "full");
  CHECK(variants[1].loss.fixed_temperature == 3.0);
  CHECK(variants[4].loss.alpha == 0.0);
  CHECK(variants[5].loss.alpha == 1.0);

  cfg.seeds = {0, 1, 2, 3, 4};
  const auto table = cmd_ablate(cfg);
  REQUIRE(table.rows.size() == 8);
  CHECK(table.rows[0].mean_delta == 0.0);
  REQUIRE(table.rows[0].test.p_value);
  CHECK(*table.rows[0].test.p_value == 1.0);
  for (const auto& row : table.rows) CHECK(row.auc.size() == 5);
  CHECK(fs::exists(cfg.out / "ablation.json"));
  CHECK(slurp(cfg.out / "ablation.txt").find("Hard labels only") != std::string::npos);

  for (auto seed : cfg.seeds) {
    const auto data = load_seed_data(cfg, seed);
    const auto hard = train_hard(cfg, data.train, seed).serialize();
    CHECK(slurp(cfg.out / "ablate" / "hard_only" / ("seed_" + std::to_string(seed)) / "model.json") == hard);
  }

  cfg.student = StudentKind::logreg;
  CHECK_THROWS_AS(cmd_ablate(cfg), ValidationError);
  fs::remove_all(cfg.out);
}
