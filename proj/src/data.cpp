/*
 * Copyright 2026 The Ballad Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "ballad/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "ballad/error.hpp"

namespace ballad {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw ContractError("matrix data size does not match shape");
  }
}

Matrix Matrix::select_rows(std::span<const Index> idx) const {
  Matrix out(idx.size(), cols_);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    auto src = row(idx[r]);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

std::size_t Dataset::anomaly_count() const {
  return static_cast<std::size_t>(std::count(truth.begin(), truth.end(), Label{1}));
}

void validate_dataset(const Dataset& ds) {
  if (ds.size() < 10) {
    throw SizeError(fmt::format("dataset '{}' has {} rows; at least 10 are required",
                                ds.name, ds.size()));
  }
  if (ds.dims() < 1) throw ValidationError("dataset needs at least one feature");
  if (ds.truth.size() != ds.size()) {
    throw ValidationError("label count does not match row count");
  }
  for (double v : ds.features.values()) {
    if (!std::isfinite(v)) throw ValidationError("non-finite feature value");
  }
  for (Label y : ds.truth) {
    if (y > 1) throw ValidationError("labels must be 0 or 1");
  }
  if (!(ds.gamma > 0.0 && ds.gamma < 1.0)) {
    throw ValidationError(fmt::format("contamination {} is outside (0,1)", ds.gamma));
  }
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_number(std::string_view field, int line) {
  double v = 0.0;
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError(fmt::format("cannot parse '{}' as a number", field), line);
  }
  return v;
}

}  // namespace

Dataset parse_dataset(const std::string& csv_text, std::string name,
                      std::optional<double> gamma_override) {
  std::istringstream in(csv_text);
  std::string raw;
  int line_no = 0;
  std::size_t cols = 0;
  bool have_header = false;
  std::vector<double> values;
  Dataset ds;
  ds.name = std::move(name);

  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line_no == 1 && line.size() >= 3 && line.substr(0, 3) == "\xEF\xBB\xBF") {
      line.remove_prefix(3);
    }
    if (line.empty()) continue;
    auto fields = split_commas(line);
    if (!have_header) {
      if (fields.size() < 2) throw ParseError("header needs at least one feature and a label", line_no);
      if (fields.back() != "label") {
        throw ParseError("final header column must be 'label'", line_no);
      }
      cols = fields.size();
      have_header = true;
      continue;
    }
    if (fields.size() != cols) {
      throw ParseError(fmt::format("expected {} fields, found {}", cols, fields.size()), line_no);
    }
    for (std::size_t j = 0; j + 1 < cols; ++j) {
      double v = parse_number(fields[j], line_no);
      if (!std::isfinite(v)) throw ParseError("non-finite feature value", line_no);
      values.push_back(v);
    }
    double y = parse_number(fields.back(), line_no);
    if (y != 0.0 && y != 1.0) {
      throw ValidationError(fmt::format("line {}: label '{}' is not 0 or 1", line_no, fields.back()));
    }
    ds.truth.push_back(static_cast<Label>(y));
  }
  if (!have_header) throw ParseError("empty file", line_no);

  ds.features = Matrix(ds.truth.size(), cols - 1, std::move(values));
  if (ds.size() < 10) {
    throw SizeError(fmt::format("dataset '{}' has {} rows; at least 10 are required",
                                ds.name, ds.size()));
  }
  ds.gamma = gamma_override ? *gamma_override
                            : static_cast<double>(ds.anomaly_count()) /
                                  static_cast<double>(ds.size());
  validate_dataset(ds);
  return ds;
}

Dataset load_dataset(const std::filesystem::path& path, std::optional<double> gamma_override) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dataset(buf.str(), path.stem().string(), gamma_override);
}

std::string format_dataset(const Dataset& ds) {
  std::string out;
  for (std::size_t j = 0; j < ds.dims(); ++j) out += fmt::format("f{},", j + 1);
  out += "label\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (double v : ds.features.row(i)) out += fmt::format("{},", v);
    out += fmt::format("{}\n", static_cast<int>(ds.truth[i]));
  }
  return out;
}

void write_dataset(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << format_dataset(ds);
}

std::string SplitView::serialize() const {
  std::string out = fmt::format("seed={} stratified={}\n", seed, stratified ? 1 : 0);
  auto emit = [&out](const char* name, const std::vector<Index>& v) {
    out += name;
    for (Index i : v) out += fmt::format(" {}", i);
    out += '\n';
  };
  emit("train", train);
  emit("val", val);
  emit("test", test);
  return out;
}

SplitView stratified_split(const Dataset& ds, std::uint64_t seed) {
  const std::size_t n = ds.size();
  const std::size_t n_train = (4 * n) / 10;
  const std::size_t n_val = (4 * n) / 10;
  std::mt19937_64 rng(seed);

  SplitView split;
  split.seed = seed;

  std::vector<Index> pos;
  std::vector<Index> neg;
  for (Index i = 0; i < n; ++i) (ds.truth[i] ? pos : neg).push_back(i);

  if (pos.size() < 3) {
    spdlog::warn("dataset '{}' has {} anomalies; using an unstratified split", ds.name,
                 pos.size());
    std::vector<Index> all(n);
    for (Index i = 0; i < n; ++i) all[i] = i;
    std::shuffle(all.begin(), all.end(), rng);
    split.stratified = false;
    split.train.assign(all.begin(), all.begin() + n_train);
    split.val.assign(all.begin() + n_train, all.begin() + n_train + n_val);
    split.test.assign(all.begin() + n_train + n_val, all.end());
  } else {
    std::shuffle(pos.begin(), pos.end(), rng);
    std::shuffle(neg.begin(), neg.end(), rng);
    const double p = static_cast<double>(pos.size());
    auto share = [&](std::size_t part) {
      return static_cast<std::size_t>(std::llround(p * static_cast<double>(part) /
                                                   static_cast<double>(n)));
    };
    std::size_t p_train = std::min(share(n_train), n_train);
    std::size_t p_val = std::min(share(n_val), n_val);
    const std::size_t n_test = n - n_train - n_val;
    // Keep the test split feasible for both classes.
    while (pos.size() - p_train - p_val > n_test) {
      (p_train <= p_val ? p_train : p_val) += 1;
    }
    while (neg.size() < (n_train - p_train) + (n_val - p_val)) {
      (p_train >= p_val ? p_train : p_val) += 1;
    }
    auto take = [](std::vector<Index>& src, std::size_t& cursor, std::size_t count,
                   std::vector<Index>& dst) {
      dst.insert(dst.end(), src.begin() + cursor, src.begin() + cursor + count);
      cursor += count;
    };
    std::size_t pc = 0;
    std::size_t nc = 0;
    take(pos, pc, p_train, split.train);
    take(neg, nc, n_train - p_train, split.train);
    take(pos, pc, p_val, split.val);
    take(neg, nc, n_val - p_val, split.val);
    take(pos, pc, pos.size() - pc, split.test);
    take(neg, nc, neg.size() - nc, split.test);
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.val.begin(), split.val.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

LabelStore::LabelStore(const SplitView& split) {
  Index max_idx = 0;
  for (const auto* v : {&split.train, &split.val, &split.test}) {
    for (Index i : *v) max_idx = std::max(max_idx, i);
  }
  in_train_.assign(max_idx + 1, false);
  in_val_.assign(max_idx + 1, false);
  for (Index i : split.train) in_train_[i] = true;
  for (Index i : split.val) in_val_[i] = true;
}

void LabelStore::add_train(Index idx, Label y) { add(Pool::kTrain, idx, y); }
void LabelStore::add_val(Index idx, Label y) { add(Pool::kValidation, idx, y); }

void LabelStore::add(Pool pool, Index idx, Label y) {
  const auto& member = pool == Pool::kTrain ? in_train_ : in_val_;
  if (idx >= member.size() || !member[idx]) {
    throw ContractError(fmt::format("index {} is not in the {} pool", idx,
                                    pool == Pool::kTrain ? "training" : "validation"));
  }
  if (y > 1) throw ValidationError("labels must be 0 or 1");
  if (contains(idx)) throw ContractError(fmt::format("index {} is already labeled", idx));
  (pool == Pool::kTrain ? train_ : val_).emplace(idx, y);
}

CostCheck check_costs(const CostParams& cp, double gamma) {
  CostCheck check;
  check.bound_fp = cp.c_fp * (1.0 - gamma);
  check.bound_fn = cp.c_fn * gamma;
  if (cp.c_fp < 0.0 || cp.c_fn < 0.0 || cp.c_r < 0.0) {
    check.message = "costs must be non-negative";
    return check;
  }
  const double bound = std::min(check.bound_fp, check.bound_fn);
  // Relative slack absorbs rounding when c_r is derived from gamma.
  check.ok = cp.c_r <= bound * (1.0 + 1e-12);
  if (!check.ok) {
    check.message = fmt::format(
        "rejection cost {} exceeds min{{c_fp*(1-gamma) = {}, c_fn*gamma = {}}} = {}", cp.c_r,
        check.bound_fp, check.bound_fn, bound);
  }
  return check;
}

void validate_costs(const CostParams& cp, double gamma) {
  auto check = check_costs(cp, gamma);
  if (!check.ok) throw ValidationError(check.message);
}

}  // namespace ballad
