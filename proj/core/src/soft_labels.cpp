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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "distillforge/error.hpp"
#include "distillforge/teacher.hpp"

namespace distillforge::teacher {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto end = line.find(',', pos);
    out.push_back(line.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos));
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

std::string format_soft_labels(const SoftLabelSet& set) {
  if (set.teacher_id.find_first_of(",\"\n\r") != std::string::npos)
    throw ValidationError("soft labels: teacher id must not contain commas, quotes or newlines");
  std::string out = "row_id,fold_id,teacher_id";
  for (int c = 0; c < set.class_count; ++c) out += ",p" + std::to_string(c);
  out += "\n";
  char buf[40];
  for (std::size_t i = 0; i < set.rows(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += std::to_string(set.fold_of[i]);
    out += ',';
    out += set.teacher_id;
    for (double p : set.probs.row(i)) {
      std::snprintf(buf, sizeof(buf), "%.17g", p);
      out += ',';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

void export_soft_labels(const SoftLabelSet& set, const std::filesystem::path& path) {
  const auto text = format_soft_labels(set);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << text;
  if (!out) throw ValidationError("write failed for " + path.string());
}

SoftLabelSet parse_soft_labels(std::string_view text, const data::Dataset& ds,
                               const data::FoldAssignment& folds, FoldCheck check) {
  if (folds.rows() != ds.rows()) throw ValidationError("soft labels: fold assignment does not cover the dataset");
  const auto classes = static_cast<std::size_t>(ds.class_count);

  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    pos = end + 1;
  }
  if (lines.empty()) throw ValidationError("soft labels: missing header");
  const auto header = split_fields(lines.front());
  if (header.size() < 3 || header[0] != "row_id" || header[1] != "fold_id" || header[2] != "teacher_id")
    throw ValidationError("soft labels: header must start with row_id,fold_id,teacher_id");
  if (header.size() - 3 != classes)
    throw ValidationError("soft labels: file has " + std::to_string(header.size() - 3) +
                          " probability columns, dataset has " + std::to_string(classes) + " classes");
  for (std::size_t c = 0; c < classes; ++c)
    if (header[3 + c] != "p" + std::to_string(c))
      throw ValidationError("soft labels: expected column p" + std::to_string(c));

  SoftLabelSet out;
  out.class_count = ds.class_count;
  out.probs = Matrix(ds.rows(), classes);
  out.fold_of = folds.fold_of;
  std::vector<bool> seen(ds.rows(), false);
  std::vector<int> declared(ds.rows(), -1);
  bool have_id = false;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto fields = split_fields(lines[li]);
    const std::string line_tag = "soft labels line " + std::to_string(li + 1);
    if (fields.size() != header.size()) throw ValidationError(line_tag + ": wrong number of fields");
    std::size_t row = 0;
    int fold = 0;
    if (!parse_number(fields[0], row) || row >= ds.rows())
      throw ValidationError(line_tag + ": bad row_id '" + std::string(fields[0]) + "'");
    if (seen[row]) throw ValidationError("soft labels: duplicate row " + std::to_string(row));
    seen[row] = true;
    if (!parse_number(fields[1], fold)) throw ValidationError(line_tag + ": bad fold_id");
    declared[row] = fold;
    if (check == FoldCheck::strict && fold != folds.fold_of[row])
      throw ValidationError("soft labels: fold mismatch at row " + std::to_string(row) + " (file " +
                            std::to_string(fold) + ", folds " + std::to_string(folds.fold_of[row]) + ")");
    if (!have_id) {
      out.teacher_id = std::string(fields[2]);
      have_id = true;
    } else if (fields[2] != out.teacher_id) {
      throw ValidationError(line_tag + ": mixed teacher ids in one file");
    }
    auto dst = out.probs.row(row);
    double sum = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      double p = 0.0;
      if (!parse_number(fields[3 + c], p) || !std::isfinite(p))
        throw ValidationError("soft labels: row " + std::to_string(row) + " has a non-numeric probability");
      if (p < -1e-6 || p > 1.0 + 1e-6)
        throw ValidationError("soft labels: row " + std::to_string(row) + " has probability outside [0, 1]");
      dst[c] = std::clamp(p, 0.0, 1.0);
      sum += dst[c];
    }
    if (std::abs(sum - 1.0) > 1e-6) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%g", sum);
      throw ValidationError("soft labels: row " + std::to_string(row) + " probabilities sum to " + buf);
    }
    if (sum != 1.0)
      for (auto& p : dst) p /= sum;
  }
  for (std::size_t r = 0; r < ds.rows(); ++r)
    if (!seen[r]) throw ValidationError("soft labels: missing row " + std::to_string(r));

  out.seen_sets.resize(static_cast<std::size_t>(folds.k));
  if (check == FoldCheck::strict) {
    for (int k = 0; k < folds.k; ++k) out.seen_sets[static_cast<std::size_t>(k)] = folds.rows_outside(k);
    return out;
  }
  // A row labelled under fold f was visible to every other fold's teacher; a
  // fold id outside [0, K) claims no held-out provenance at all.
  for (std::size_t r = 0; r < ds.rows(); ++r)
    for (int k = 0; k < folds.k; ++k)
      if (declared[r] != k) out.seen_sets[static_cast<std::size_t>(k)].push_back(r);
  return out;
}

SoftLabelSet import_soft_labels(const std::filesystem::path& path, const data::Dataset& ds,
                                const data::FoldAssignment& folds, FoldCheck check) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open soft-label file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_soft_labels(ss.str(), ds, folds, check);
}

}  // namespace distillforge::teacher
