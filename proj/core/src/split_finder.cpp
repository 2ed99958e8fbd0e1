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

#include "split_finder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "distillforge/error.hpp"

namespace distillforge::gbdt {

namespace detail {

ColumnIndex ColumnIndex::build(const Matrix& x) {
  ColumnIndex index;
  index.sorted.resize(x.cols());
  index.missing.resize(x.cols());
  for (std::size_t f = 0; f < x.cols(); ++f) {
    auto& order = index.sorted[f];
    for (std::uint32_t r = 0; r < x.rows(); ++r) {
      if (std::isnan(x(r, f)))
        index.missing[f].push_back(r);
      else
        order.push_back(r);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return x(a, f) < x(b, f); });
  }
  return index;
}

double min_gain(double parent_score) { return 1e-12 * (1.0 + std::abs(parent_score)); }

namespace {

struct NodeStats {
  double g = 0.0;
  double h = 0.0;
  std::size_t n = 0;
};

struct ScanState {
  double g = 0.0;
  double h = 0.0;
  std::size_t n = 0;
  double last = 0.0;
  bool has_last = false;
};

struct Best {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

double midpoint(double lo, double hi) {
  const double mid = lo + 0.5 * (hi - lo);
  return mid < hi ? mid : lo;
}

}  // namespace

Tree grow_tree(const Matrix& x, const ColumnIndex& index, std::span<const double> grads,
               std::span<const double> hessians, const GbdtConfig& cfg, std::vector<std::int32_t>& leaf_of) {
  const std::size_t m = x.rows();
  Tree tree(1);
  std::vector<NodeStats> stats(1);
  leaf_of.assign(m, 0);
  for (std::size_t r = 0; r < m; ++r) {
    stats[0].g += grads[r];
    stats[0].h += hessians[r];
    ++stats[0].n;
  }

  std::vector<int> active{0};
  for (int depth = 0; depth < cfg.max_depth && !active.empty(); ++depth) {
    const std::size_t nodes = tree.size();
    std::vector<char> is_active(nodes, 0);
    for (int a : active)
      if (stats[static_cast<std::size_t>(a)].n >= 2 * cfg.min_leaf) is_active[static_cast<std::size_t>(a)] = 1;

    std::vector<Best> best(nodes);
    std::vector<ScanState> scan(nodes);
    for (std::size_t f = 0; f < x.cols(); ++f) {
      for (int a : active) scan[static_cast<std::size_t>(a)] = ScanState{};
      for (auto r : index.missing[f]) {
        const auto node = static_cast<std::size_t>(leaf_of[r]);
        if (!is_active[node]) continue;
        scan[node].g += grads[r];
        scan[node].h += hessians[r];
        ++scan[node].n;
      }
      for (auto r : index.sorted[f]) {
        const auto node = static_cast<std::size_t>(leaf_of[r]);
        if (!is_active[node]) continue;
        auto& st = scan[node];
        const double v = x(r, f);
        if (st.has_last && v > st.last && st.n >= cfg.min_leaf && stats[node].n - st.n >= cfg.min_leaf) {
          const double gain = split_gain(st.g, st.h, stats[node].g, stats[node].h, cfg.lambda);
          if (gain > best[node].gain) {
            best[node].gain = gain;
            best[node].feature = static_cast<int>(f);
            best[node].threshold = midpoint(st.last, v);
          }
        }
        st.g += grads[r];
        st.h += hessians[r];
        ++st.n;
        st.last = v;
        st.has_last = true;
      }
    }

    std::vector<int> next;
    std::vector<std::int32_t> left_child(nodes, -1);
    for (int a : active) {
      const auto node = static_cast<std::size_t>(a);
      const double parent = stats[node].g * stats[node].g / (stats[node].h + cfg.lambda);
      if (best[node].feature < 0 || !(best[node].gain > min_gain(parent))) continue;
      const int l = static_cast<int>(tree.size());
      tree.emplace_back();
      tree.emplace_back();
      stats.emplace_back();
      stats.emplace_back();
      tree[node].feature = best[node].feature;
      tree[node].threshold = best[node].threshold;
      tree[node].left = l;
      tree[node].right = l + 1;
      left_child[node] = l;
      next.push_back(l);
      next.push_back(l + 1);
    }
    if (next.empty()) break;
    for (std::size_t r = 0; r < m; ++r) {
      const auto node = static_cast<std::size_t>(leaf_of[r]);
      if (node >= nodes || left_child[node] < 0) continue;
      const double v = x(r, static_cast<std::size_t>(tree[node].feature));
      const int child = std::isnan(v) || v <= tree[node].threshold ? left_child[node] : left_child[node] + 1;
      leaf_of[r] = child;
      auto& s = stats[static_cast<std::size_t>(child)];
      s.g += grads[r];
      s.h += hessians[r];
      ++s.n;
    }
    active = std::move(next);
  }

  for (std::size_t node = 0; node < tree.size(); ++node)
    if (tree[node].is_leaf()) tree[node].value = -stats[node].g / (stats[node].h + cfg.lambda);
  return tree;
}

}  // namespace detail

double split_gain(double g_left, double h_left, double g_total, double h_total, double lambda) {
  const double g_right = g_total - g_left;
  const double h_right = h_total - h_left;
  return g_left * g_left / (h_left + lambda) + g_right * g_right / (h_right + lambda) -
         g_total * g_total / (h_total + lambda);
}

std::optional<SplitCandidate> split_finding(std::span<const double> values, std::span<const double> grads,
                                            std::span<const double> hessians, const GbdtConfig& cfg) {
  if (values.size() != grads.size() || values.size() != hessians.size())
    throw ValidationError("split_finding: column, gradient and hessian lengths differ");
  Matrix x(values.size(), 1, std::vector<double>(values.begin(), values.end()));
  const auto index = detail::ColumnIndex::build(x);
  GbdtConfig one_level = cfg;
  one_level.max_depth = 1;
  std::vector<std::int32_t> leaf_of;
  const auto tree = detail::grow_tree(x, index, grads, hessians, one_level, leaf_of);
  if (tree.front().is_leaf()) return std::nullopt;

  double g_left = 0.0, h_left = 0.0, g = 0.0, h = 0.0;
  for (std::size_t r = 0; r < values.size(); ++r) {
    g += grads[r];
    h += hessians[r];
    if (leaf_of[r] == tree.front().left) g_left += grads[r], h_left += hessians[r];
  }
  return SplitCandidate{0, tree.front().threshold, split_gain(g_left, h_left, g, h, cfg.lambda)};
}

}  // namespace distillforge::gbdt
