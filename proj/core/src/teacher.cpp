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

#include "distillforge/teacher.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "distillforge/error.hpp"
#include "distillforge/random.hpp"

namespace distillforge::teacher {

void SoftLabelSet::validate() const {
  if (probs.rows() != fold_of.size()) throw ValidationError("soft labels: row count mismatch");
  if (probs.cols() != static_cast<std::size_t>(class_count))
    throw ValidationError("soft labels: column count does not match class count");
  for (std::size_t i = 0; i < probs.rows(); ++i) {
    double sum = 0.0;
    for (double p : probs.row(i)) {
      if (!(p >= 0.0 && p <= 1.0))
        throw ValidationError("soft labels: row " + std::to_string(i) + " has an entry outside [0, 1]");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw ValidationError("soft labels: row " + std::to_string(i) + " sums to " + std::to_string(sum));
  }
}

namespace {

std::uint64_t parse_uint(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ValidationError("teacher spec: bad value '" + std::string(v) + "' for " + std::string(key));
  return out;
}

}  // namespace

void TeacherSpec::validate() const {
  switch (kind) {
    case TeacherKind::file:
      if (path.empty()) throw ValidationError("teacher spec: file teacher requires a path");
      break;
    case TeacherKind::bagged_tree:
      if (trees < 1) throw ValidationError("teacher spec: bagged teacher needs at least one tree");
      if (depth < 0) throw ValidationError("teacher spec: negative depth");
      break;
    case TeacherKind::knn: break;
  }
}

std::string TeacherSpec::id() const {
  switch (kind) {
    case TeacherKind::knn: return knn_k ? "knn-k" + std::to_string(knn_k) : "knn";
    case TeacherKind::bagged_tree:
      return "bagged-t" + std::to_string(trees) + "-d" + std::to_string(depth);
    case TeacherKind::file: return "file-" + path.stem().string();
  }
  return "teacher";
}

TeacherSpec TeacherSpec::parse(std::string_view text) {
  TeacherSpec spec;
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  const std::string_view rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  if (head == "file") {
    spec.kind = TeacherKind::file;
    spec.path = std::string(rest);
    spec.validate();
    return spec;
  }
  if (head == "knn")
    spec.kind = TeacherKind::knn;
  else if (head == "bagged" || head == "bagged_tree")
    spec.kind = TeacherKind::bagged_tree;
  else
    throw ValidationError("teacher spec: unknown kind '" + std::string(head) + "'");

  std::size_t pos = 0;
  while (pos < rest.size()) {
    auto end = rest.find(',', pos);
    if (end == std::string_view::npos) end = rest.size();
    const auto item = rest.substr(pos, end - pos);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw ValidationError("teacher spec: expected key=value, got '" + std::string(item) + "'");
    const auto key = item.substr(0, eq);
    const auto val = item.substr(eq + 1);
    if (key == "k")
      spec.knn_k = parse_uint(key, val);
    else if (key == "trees")
      spec.trees = static_cast<int>(parse_uint(key, val));
    else if (key == "depth")
      spec.depth = static_cast<int>(parse_uint(key, val));
    else if (key == "seed")
      spec.seed = parse_uint(key, val);
    else
      throw ValidationError("teacher spec: unknown key '" + std::string(key) + "'");
    pos = end + 1;
  }
  spec.validate();
  return spec;
}

// ---------------------------------------------------------------- k-NN

KnnTeacher KnnTeacher::fit(const data::Dataset& train, std::size_t k) {
  const std::size_t n = train.rows();
  if (n == 0) throw ValidationError("knn teacher: empty training set");
  if (k == 0) k = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  if (k > n) throw ValidationError("knn teacher: k exceeds training rows");
  KnnTeacher t;
  t.k_ = k;
  t.class_count_ = train.class_count;
  t.labels_ = train.labels;
  const std::size_t d = train.feature_count();
  t.mean_.assign(d, 0.0);
  t.scale_.assign(d, 1.0);
  for (std::size_t c = 0; c < d; ++c) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t r = 0; r < n; ++r) {
      const double v = train.features(r, c);
      if (!std::isnan(v)) sum += v, ++count;
    }
    const double mean = count ? sum / static_cast<double>(count) : 0.0;
    double ss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double v = train.features(r, c);
      if (!std::isnan(v)) ss += (v - mean) * (v - mean);
    }
    const double sd = count ? std::sqrt(ss / static_cast<double>(count)) : 0.0;
    t.mean_[c] = mean;
    t.scale_[c] = sd > 1e-12 ? sd : 1.0;
  }
  t.train_ = Matrix(n, d);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) {
      const double v = train.features(r, c);
      t.train_(r, c) = std::isnan(v) ? 0.0 : (v - t.mean_[c]) / t.scale_[c];
    }
  return t;
}

Matrix KnnTeacher::predict_proba(const Matrix& rows) const {
  const std::size_t d = mean_.size();
  if (rows.cols() != d) throw ValidationError("knn teacher: feature count mismatch");
  const std::size_t n = train_.rows();
  const auto classes = static_cast<std::size_t>(class_count_);
  Matrix out(rows.rows(), classes);
  std::vector<double> query(d);
  std::vector<std::pair<double, std::size_t>> dist(n);
  std::vector<double> vote(classes);
  for (std::size_t q = 0; q < rows.rows(); ++q) {
    for (std::size_t c = 0; c < d; ++c) {
      const double v = rows(q, c);
      query[c] = std::isnan(v) ? 0.0 : (v - mean_[c]) / scale_[c];
    }
    for (std::size_t r = 0; r < n; ++r) {
      double s = 0.0;
      auto x = train_.row(r);
      for (std::size_t c = 0; c < d; ++c) {
        const double diff = x[c] - query[c];
        s += diff * diff;
      }
      dist[r] = {s, r};
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_), dist.end());
    std::fill(vote.begin(), vote.end(), 0.0);
    double total = 0.0;
    for (std::size_t j = 0; j < k_; ++j) {
      const double w = 1.0 / (std::sqrt(dist[j].first) + 1e-9);
      vote[static_cast<std::size_t>(labels_[dist[j].second])] += w;
      total += w;
    }
    const double denom = static_cast<double>(k_) + static_cast<double>(classes);
    for (std::size_t c = 0; c < classes; ++c)
      out(q, c) = (vote[c] * static_cast<double>(k_) / total + 1.0) / denom;
  }
  return out;
}

// ---------------------------------------------------------- bagged CART

namespace {

class CartBuilder {
 public:
  CartBuilder(const Matrix& x, const std::vector<int>& y, int classes, int max_depth)
      : x_(x), y_(y), classes_(static_cast<std::size_t>(classes)), max_depth_(max_depth) {}

  std::vector<BaggedTreeTeacher::Node> build(std::vector<std::size_t> rows) {
    nodes_.clear();
    grow(rows, 0);
    return std::move(nodes_);
  }

 private:
  static double gini_sum(const std::vector<double>& counts, double n) {
    if (n <= 0) return 0.0;
    double s = 0.0;
    for (double c : counts) s += c * c;
    return n - s / n;  // n * gini
  }

  int grow(std::vector<std::size_t>& rows, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    std::vector<double> counts(classes_, 0.0);
    for (auto r : rows) counts[static_cast<std::size_t>(y_[r])] += 1.0;
    const double n = static_cast<double>(rows.size());
    const bool pure = std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0; }) <= 1;

    int best_feature = -1;
    double best_threshold = 0.0;
    if (depth < max_depth_ && rows.size() >= 2 && !pure) {
      const double parent = gini_sum(counts, n);
      double best_gain = 1e-12;
      std::vector<std::size_t> order(rows);
      std::vector<double> left(classes_);
      std::vector<double> right(classes_);
      for (std::size_t f = 0; f < x_.cols(); ++f) {
        // NaN sorts first and always travels left.
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
          const double va = x_(a, f), vb = x_(b, f);
          const bool na = std::isnan(va), nb = std::isnan(vb);
          if (na != nb) return na;
          if (!na && va != vb) return va < vb;
          return a < b;
        });
        std::fill(left.begin(), left.end(), 0.0);
        right = counts;
        for (std::size_t i = 0; i + 1 < order.size(); ++i) {
          const auto cls = static_cast<std::size_t>(y_[order[i]]);
          left[cls] += 1.0;
          right[cls] -= 1.0;
          const double v = x_(order[i], f);
          const double next = x_(order[i + 1], f);
          if (std::isnan(v) || std::isnan(next) || !(next > v)) continue;
          const double nl = static_cast<double>(i + 1);
          const double gain = parent - gini_sum(left, nl) - gini_sum(right, n - nl);
          if (gain > best_gain) {
            best_gain = gain;
            best_feature = static_cast<int>(f);
            double mid = 0.5 * (v + next);
            if (!(mid < next)) mid = v;
            best_threshold = mid;
          }
        }
      }
    }

    if (best_feature < 0) {
      auto& leaf = nodes_[static_cast<std::size_t>(id)];
      leaf.probs.resize(classes_);
      for (std::size_t c = 0; c < classes_; ++c)
        leaf.probs[c] = (counts[c] + 1.0) / (n + static_cast<double>(classes_));
      return id;
    }

    std::vector<std::size_t> left_rows, right_rows;
    for (auto r : rows) {
      const double v = x_(r, static_cast<std::size_t>(best_feature));
      (std::isnan(v) || v <= best_threshold ? left_rows : right_rows).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    const int l = grow(left_rows, depth + 1);
    const int r = grow(right_rows, depth + 1);
    auto& node = nodes_[static_cast<std::size_t>(id)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  const Matrix& x_;
  const std::vector<int>& y_;
  std::size_t classes_;
  int max_depth_;
  std::vector<BaggedTreeTeacher::Node> nodes_;
};

}  // namespace

BaggedTreeTeacher BaggedTreeTeacher::fit(const data::Dataset& train, int trees, int depth,
                                         std::uint64_t seed) {
  if (trees < 1) throw ValidationError("bagged teacher: trees must be at least 1");
  if (train.rows() == 0) throw ValidationError("bagged teacher: empty training set");
  BaggedTreeTeacher t;
  t.class_count_ = train.class_count;
  Rng rng(seed);
  CartBuilder builder(train.features, train.labels, train.class_count, depth);
  const std::size_t n = train.rows();
  for (int b = 0; b < trees; ++b) {
    std::vector<std::size_t> sample(n);
    for (auto& s : sample) s = rng.below(n);
    t.trees_.push_back(builder.build(std::move(sample)));
  }
  return t;
}

Matrix BaggedTreeTeacher::predict_proba(const Matrix& rows) const {
  const auto classes = static_cast<std::size_t>(class_count_);
  Matrix out(rows.rows(), classes);
  const double inv = 1.0 / static_cast<double>(trees_.size());
  for (std::size_t q = 0; q < rows.rows(); ++q) {
    auto x = rows.row(q);
    auto dst = out.row(q);
    for (const auto& tree : trees_) {
      std::size_t node = 0;
      while (tree[node].feature >= 0) {
        const double v = x[static_cast<std::size_t>(tree[node].feature)];
        node = static_cast<std::size_t>(std::isnan(v) || v <= tree[node].threshold ? tree[node].left
                                                                                    : tree[node].right);
      }
      for (std::size_t c = 0; c < classes; ++c) dst[c] += tree[node].probs[c];
    }
    for (auto& p : dst) p *= inv;
  }
  return out;
}

std::unique_ptr<Predictor> fit_teacher(const TeacherSpec& spec, const data::Dataset& train) {
  spec.validate();
  switch (spec.kind) {
    case TeacherKind::knn: return std::make_unique<KnnTeacher>(KnnTeacher::fit(train, spec.knn_k));
    case TeacherKind::bagged_tree:
      return std::make_unique<BaggedTreeTeacher>(
          BaggedTreeTeacher::fit(train, spec.trees, spec.depth, spec.seed));
    case TeacherKind::file: break;
  }
  throw ValidationError("file teachers carry precomputed labels and cannot be fitted");
}

SoftLabelSet oof_label(const data::Dataset& ds, const data::FoldAssignment& folds,
                       const TeacherSpec& spec) {
  if (folds.rows() != ds.rows()) throw ValidationError("oof_label: fold assignment does not cover the dataset");
  if (spec.kind == TeacherKind::file) return import_soft_labels(spec.path, ds, folds);

  SoftLabelSet out;
  out.class_count = ds.class_count;
  out.probs = Matrix(ds.rows(), static_cast<std::size_t>(ds.class_count));
  out.fold_of = folds.fold_of;
  out.teacher_id = spec.id();
  out.seen_sets.resize(static_cast<std::size_t>(folds.k));
  for (int k = 0; k < folds.k; ++k) {
    auto inside = folds.rows_in(k);
    auto outside = folds.rows_outside(k);
    if (inside.empty()) continue;
    std::unique_ptr<Predictor> model;
    try {
      model = fit_teacher(spec, ds.subset(outside));
    } catch (const std::exception& e) {
      throw ValidationError("teacher fit failed on fold " + std::to_string(k) + ": " + e.what());
    }
    auto probs = model->predict_proba(ds.features.select_rows(inside));
    for (std::size_t i = 0; i < inside.size(); ++i) {
      auto src = probs.row(i);
      std::copy(src.begin(), src.end(), out.probs.row(inside[i]).begin());
    }
    out.seen_sets[static_cast<std::size_t>(k)] = std::move(outside);
  }
  return out;
}

SoftLabelSet average_teachers(std::span<const SoftLabelSet> sets) {
  if (sets.empty()) throw ValidationError("average_teachers: no soft-label sets given");
  const auto& first = sets.front();
  for (const auto& s : sets) {
    if (s.rows() != first.rows()) throw ValidationError("average_teachers: row counts differ");
    if (s.class_count != first.class_count) throw ValidationError("average_teachers: class counts differ");
    if (s.fold_of != first.fold_of) throw ValidationError("average_teachers: fold assignments differ");
  }
  SoftLabelSet out;
  out.class_count = first.class_count;
  out.fold_of = first.fold_of;
  out.probs = Matrix(first.probs.rows(), first.probs.cols());
  const std::size_t m = sets.size();
  std::vector<double> vals(m);
  for (std::size_t e = 0; e < out.probs.data().size(); ++e) {
    for (std::size_t j = 0; j < m; ++j) vals[j] = sets[j].probs.data()[e];
    // Summing sorted offsets from the minimum makes the result independent of
    // list order and exact when all inputs agree.
    std::sort(vals.begin(), vals.end());
    double acc = 0.0;
    for (double v : vals) acc += v - vals.front();
    out.probs.data()[e] = vals.front() + acc / static_cast<double>(m);
  }

  std::vector<std::string> ids;
  for (const auto& s : sets) ids.push_back(s.teacher_id);
  std::sort(ids.begin(), ids.end());
  for (std::size_t j = 0; j < ids.size(); ++j) out.teacher_id += (j ? "+" : "") + ids[j];

  std::size_t folds = 0;
  for (const auto& s : sets) folds = std::max(folds, s.seen_sets.size());
  out.seen_sets.resize(folds);
  for (std::size_t k = 0; k < folds; ++k) {
    std::vector<std::size_t> merged;
    for (const auto& s : sets)
      if (k < s.seen_sets.size()) merged.insert(merged.end(), s.seen_sets[k].begin(), s.seen_sets[k].end());
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    out.seen_sets[k] = std::move(merged);
  }
  return out;
}

AuditReport leakage_audit(const SoftLabelSet& set) {
  AuditReport report;
  auto sorted = set.seen_sets;
  for (auto& s : sorted) std::sort(s.begin(), s.end());
  for (std::size_t i = 0; i < set.rows(); ++i) {
    const int fold = set.fold_of[i];
    if (fold < 0 || static_cast<std::size_t>(fold) >= sorted.size()) continue;
    const auto& seen = sorted[static_cast<std::size_t>(fold)];
    if (std::binary_search(seen.begin(), seen.end(), i)) report.offending_rows.push_back(i);
  }
  report.passed = report.offending_rows.empty();
  return report;
}

}  // namespace distillforge::teacher
