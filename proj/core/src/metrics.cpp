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

#include "distillforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <json.hpp>

#include "distillforge/distill.hpp"
#include "distillforge/error.hpp"

namespace distillforge::metrics {

using nlohmann::json;

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw ValidationError("auc: scores and labels differ in length");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  double n_pos = 0.0, n_neg = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) {
        rank_sum += midrank;
        n_pos += 1.0;
      } else if (labels[order[k]] == 0) {
        n_neg += 1.0;
      } else {
        throw ValidationError("auc: labels must be 0 or 1");
      }
    }
    i = j;
  }
  if (n_pos == 0.0 || n_neg == 0.0) throw ValidationError("auc: both classes must be present");
  return (rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

double macro_auc(const Matrix& probs, std::span<const int> labels) {
  if (probs.rows() != labels.size()) throw ValidationError("macro_auc: probs and labels differ in length");
  if (probs.cols() == 2) return auc(probs.column(1), labels);
  std::set<int> present(labels.begin(), labels.end());
  if (present.size() < 2) throw ValidationError("macro_auc: need at least two classes present");
  double total = 0.0;
  for (int c : present) {
    if (c < 0 || static_cast<std::size_t>(c) >= probs.cols()) throw ValidationError("macro_auc: label outside class range");
    std::vector<int> binary(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) binary[i] = labels[i] == c ? 1 : 0;
    total += auc(probs.column(static_cast<std::size_t>(c)), binary);
  }
  return total / static_cast<double>(present.size());
}

double task_auc(const Matrix& probs, std::span<const int> labels) { return macro_auc(probs, labels); }

double retention(double student_auc, double teacher_auc) {
  if (!(teacher_auc > 0.0)) throw ValidationError("retention: teacher AUC must be positive");
  return student_auc / teacher_auc * 100.0;
}

double ece(const Matrix& probs, std::span<const int> labels, std::size_t bins) {
  if (probs.rows() != labels.size()) throw ValidationError("ece: probs and labels differ in length");
  if (bins == 0) throw ValidationError("ece: bin count must be positive");
  if (probs.rows() == 0) throw ValidationError("ece: no rows");
  std::vector<long double> conf_sum(bins, 0.0L), correct(bins, 0.0L);
  for (std::size_t i = 0; i < probs.rows(); ++i) {
    auto p = probs.row(i);
    const auto top = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
    const double conf = p[top];
    const auto b = std::min(static_cast<std::size_t>(std::floor(conf * static_cast<double>(bins))), bins - 1);
    conf_sum[b] += conf;
    if (static_cast<int>(top) == labels[i]) correct[b] += 1.0L;
  }
  long double total = 0.0L;
  for (std::size_t b = 0; b < bins; ++b) total += std::fabs(correct[b] - conf_sum[b]);
  return static_cast<double>(total / static_cast<long double>(probs.rows()));
}

double brier(const Matrix& probs, std::span<const int> labels) {
  if (probs.rows() != labels.size()) throw ValidationError("brier: probs and labels differ in length");
  if (probs.rows() == 0) throw ValidationError("brier: no rows");
  double total = 0.0;
  for (std::size_t i = 0; i < probs.rows(); ++i)
    for (std::size_t c = 0; c < probs.cols(); ++c) {
      const double d = probs(i, c) - (static_cast<int>(c) == labels[i] ? 1.0 : 0.0);
      total += d * d;
    }
  return total / static_cast<double>(probs.rows());
}

double brier_binary(const Matrix& probs, std::span<const int> labels) {
  if (probs.cols() != 2) throw ValidationError("brier_binary: expects two-column probabilities");
  if (probs.rows() != labels.size()) throw ValidationError("brier: probs and labels differ in length");
  if (probs.rows() == 0) throw ValidationError("brier: no rows");
  double total = 0.0;
  for (std::size_t i = 0; i < probs.rows(); ++i) {
    const double d = probs(i, 1) - static_cast<double>(labels[i]);
    total += d * d;
  }
  return total / static_cast<double>(probs.rows());
}

double cross_entropy(const Matrix& logits, std::span<const int> labels, double temperature) {
  if (logits.rows() != labels.size()) throw ValidationError("cross_entropy: logits and labels differ in length");
  if (logits.rows() == 0) throw ValidationError("cross_entropy: no rows");
  double total = 0.0;
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    auto z = logits.row(i);
    double m = -INFINITY;
    for (double v : z) m = std::max(m, v / temperature);
    double s = 0.0;
    for (double v : z) s += std::exp(v / temperature - m);
    total += m + std::log(s) - z[static_cast<std::size_t>(labels[i])] / temperature;
  }
  return total / static_cast<double>(logits.rows());
}

double fit_temperature(const Matrix& logits, std::span<const int> labels, const TemperatureSearch& search) {
  if (!(search.lo > 0.0 && search.lo < search.hi && search.tol > 0.0))
    throw ValidationError("fit_temperature: invalid search interval");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = search.lo, b = search.hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = cross_entropy(logits, labels, c), fd = cross_entropy(logits, labels, d);
  while (b - a > search.tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = cross_entropy(logits, labels, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = cross_entropy(logits, labels, d);
    }
  }
  const double t = 0.5 * (a + b);
  return cross_entropy(logits, labels, 1.0) <= cross_entropy(logits, labels, t) ? 1.0 : t;
}

Matrix log_probs(const Matrix& probs) {
  Matrix out(probs.rows(), probs.cols());
  for (std::size_t k = 0; k < probs.data().size(); ++k) out.data()[k] = std::log(std::max(probs.data()[k], 1e-15));
  return out;
}

Matrix apply_temperature(const Matrix& logits, double temperature) {
  Matrix out(logits.rows(), logits.cols());
  for (std::size_t i = 0; i < logits.rows(); ++i) distill::softmax_at(logits.row(i), temperature, out.row(i));
  return out;
}

std::vector<int> decisions(const Matrix& probs, double threshold) {
  if (probs.cols() != 2) throw ValidationError("decisions: expects two-column probabilities");
  std::vector<int> out(probs.rows());
  for (std::size_t i = 0; i < probs.rows(); ++i) out[i] = probs(i, 1) >= threshold ? 1 : 0;
  return out;
}

namespace {

struct Rates {
  double hits = 0.0;
  double total = 0.0;
};

double gap(const std::map<int, Rates>& rates) {
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& [g, r] : rates) {
    if (r.total == 0.0) continue;
    const double v = r.hits / r.total;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi >= lo ? hi - lo : 0.0;
}

}  // namespace

double dp_diff(std::span<const int> decisions, std::span<const int> groups) {
  if (decisions.size() != groups.size()) throw ValidationError("dp_diff: decisions and groups differ in length");
  std::map<int, Rates> rates;
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    auto& r = rates[groups[i]];
    r.total += 1.0;
    r.hits += decisions[i] == 1 ? 1.0 : 0.0;
  }
  return gap(rates);
}

EoResult eo_diff(std::span<const int> decisions, std::span<const int> labels, std::span<const int> groups,
                 EoVariant variant) {
  if (decisions.size() != groups.size() || labels.size() != groups.size())
    throw ValidationError("eo_diff: inputs differ in length");
  std::map<int, Rates> tpr, fpr;
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    auto& r = labels[i] == 1 ? tpr[groups[i]] : fpr[groups[i]];
    r.total += 1.0;
    r.hits += decisions[i] == 1 ? 1.0 : 0.0;
  }
  EoResult result;
  std::set<int> all(groups.begin(), groups.end());
  for (int g : all)
    if (!tpr.contains(g)) result.excluded_groups.push_back(g);
  if (tpr.empty()) throw ValidationError("eo_diff: no group has positive labels");
  result.value = gap(tpr);
  if (variant == EoVariant::odds) {
    std::map<int, Rates> fpr_counted;
    for (const auto& [g, r] : fpr)
      if (tpr.contains(g)) fpr_counted[g] = r;
    result.value = std::max(result.value, gap(fpr_counted));
  }
  return result;
}

std::string EvalReport::to_json() const {
  json j = {{"auc", auc},
            {"retention_pct", retention_pct ? json(*retention_pct) : json(nullptr)},
            {"ece", ece},
            {"brier", brier},
            {"ece_ts", ece_ts},
            {"brier_ts", brier_ts},
            {"fitted_temperature", fitted_temperature},
            {"dp_diff", dp_diff},
            {"eo_diff", eo_diff},
            {"eo_excluded_groups", eo_excluded_groups},
            {"n_test", n_test},
            {"n_calibration", n_calibration},
            {"ece_bins", ece_bins},
            {"threshold", threshold},
            {"eo_variant", eo_variant}};
  return j.dump(2) + "\n";
}

EvalReport EvalReport::from_json(std::string_view text) {
  try {
    const auto j = json::parse(text);
    EvalReport r;
    r.auc = j.at("auc").get<double>();
    if (!j.at("retention_pct").is_null()) r.retention_pct = j.at("retention_pct").get<double>();
    r.ece = j.at("ece").get<double>();
    r.brier = j.at("brier").get<double>();
    r.ece_ts = j.at("ece_ts").get<double>();
    r.brier_ts = j.at("brier_ts").get<double>();
    r.fitted_temperature = j.at("fitted_temperature").get<double>();
    r.dp_diff = j.at("dp_diff").get<std::map<std::string, double>>();
    r.eo_diff = j.at("eo_diff").get<std::map<std::string, double>>();
    r.eo_excluded_groups = j.at("eo_excluded_groups").get<std::map<std::string, std::vector<int>>>();
    r.n_test = j.at("n_test").get<std::size_t>();
    r.n_calibration = j.at("n_calibration").get<std::size_t>();
    r.ece_bins = j.at("ece_bins").get<std::size_t>();
    r.threshold = j.at("threshold").get<double>();
    r.eo_variant = j.at("eo_variant").get<std::string>();
    return r;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("eval report: ") + e.what());
  }
}

EvalReport evaluate(const EvalInput& input, const EvalOptions& options) {
  if (input.test_logits.rows() != input.test_labels.size())
    throw ValidationError("evaluate: test logits and labels differ in length");
  EvalReport r;
  r.n_test = input.test_labels.size();
  r.n_calibration = input.calib_labels.size();
  r.ece_bins = options.ece_bins;
  r.threshold = options.threshold;
  r.eo_variant = options.eo_variant == EoVariant::odds ? "odds" : "opportunity";
  const bool binary = input.test_logits.cols() == 2;

  const Matrix probs = apply_temperature(input.test_logits, 1.0);
  r.auc = task_auc(probs, input.test_labels);
  if (input.teacher_auc) r.retention_pct = retention(r.auc, *input.teacher_auc);
  r.ece = ece(probs, input.test_labels, options.ece_bins);
  r.brier = binary ? brier_binary(probs, input.test_labels) : brier(probs, input.test_labels);

  r.fitted_temperature = input.calib_labels.empty()
                             ? 1.0
                             : fit_temperature(input.calib_logits, input.calib_labels, options.search);
  const Matrix scaled = apply_temperature(input.test_logits, r.fitted_temperature);
  r.ece_ts = ece(scaled, input.test_labels, options.ece_bins);
  r.brier_ts = binary ? brier_binary(scaled, input.test_labels) : brier(scaled, input.test_labels);

  if (binary) {
    const auto dec = decisions(probs, options.threshold);
    for (const auto& [name, groups] : input.sensitive) {
      if (groups.size() != r.n_test) throw ValidationError("evaluate: sensitive column '" + name + "' has wrong length");
      r.dp_diff[name] = dp_diff(dec, groups);
      const auto eo = eo_diff(dec, input.test_labels, groups, options.eo_variant);
      r.eo_diff[name] = eo.value;
      if (!eo.excluded_groups.empty()) r.eo_excluded_groups[name] = eo.excluded_groups;
    }
  }
  return r;
}

}  // namespace distillforge::metrics
