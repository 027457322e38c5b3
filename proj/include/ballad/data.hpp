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

// Dataset representation, label bookkeeping, splitting and cost parameters.

#ifndef BALLAD_DATA_HPP_
#define BALLAD_DATA_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ballad {

using Index = std::size_t;
using Label = std::uint8_t;

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }

  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  const std::vector<double>& values() const { return data_; }

  // Rows selected by `idx`, in that order.
  Matrix select_rows(std::span<const Index> idx) const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Feature matrix plus ground-truth labels and contamination factor.
//
// The labels are only ever read by an oracle (simulated labeling) and by the
// evaluation on the test split; learners see indices and purchased labels.
struct Dataset {
  std::string name;
  Matrix features;
  std::vector<Label> truth;
  double gamma = 0.0;

  std::size_t size() const { return features.rows(); }
  std::size_t dims() const { return features.cols(); }
  std::size_t anomaly_count() const;
};

// Checks finiteness, n >= 10, d >= 1, binary labels and gamma in (0,1).
void validate_dataset(const Dataset& ds);

// Reads the `f1..fd,label` CSV format. `gamma_override` replaces the
// label-derived contamination when given.
Dataset load_dataset(const std::filesystem::path& path,
                     std::optional<double> gamma_override = std::nullopt);
Dataset parse_dataset(const std::string& csv_text, std::string name,
                      std::optional<double> gamma_override = std::nullopt);

// Writes the same format with round-trip exact numbers.
void write_dataset(const Dataset& ds, const std::filesystem::path& path);
std::string format_dataset(const Dataset& ds);

// Train/validation/test partition. Index lists are sorted ascending.
struct SplitView {
  std::vector<Index> train;
  std::vector<Index> val;
  std::vector<Index> test;
  std::uint64_t seed = 0;
  bool stratified = true;

  // Canonical text form used for byte-level determinism checks.
  std::string serialize() const;
};

// 40/40/20 split: floor(0.4n) train, floor(0.4n) validation, the rest test.
// Stratified by ground truth; falls back to a plain shuffle (with a warning)
// when the dataset has fewer than 3 anomalies.
SplitView stratified_split(const Dataset& ds, std::uint64_t seed);

enum class Pool { kTrain, kValidation };

// Purchased labels for the training and validation pools, keyed by dataset
// row index. Each key can be inserted at most once.
class LabelStore {
 public:
  LabelStore() = default;
  explicit LabelStore(const SplitView& split);

  void add_train(Index idx, Label y);
  void add_val(Index idx, Label y);
  void add(Pool pool, Index idx, Label y);

  bool contains(Index idx) const {
    return train_.count(idx) != 0 || val_.count(idx) != 0;
  }
  const std::map<Index, Label>& train() const { return train_; }
  const std::map<Index, Label>& val() const { return val_; }
  const std::map<Index, Label>& pool(Pool p) const {
    return p == Pool::kTrain ? train_ : val_;
  }
  std::size_t total() const { return train_.size() + val_.size(); }

 private:
  std::vector<bool> in_train_;
  std::vector<bool> in_val_;
  std::map<Index, Label> train_;
  std::map<Index, Label> val_;
};

// Misclassification and rejection costs.
struct CostParams {
  double c_fp = 1.0;
  double c_fn = 1.0;
  double c_r = 0.0;
};

struct CostCheck {
  bool ok = false;
  double bound_fp = 0.0;  // c_fp * (1 - gamma)
  double bound_fn = 0.0;  // c_fn * gamma
  std::string message;
};

// Rejecting must be cheaper than either constant predictor:
// c_r <= min{c_fp (1 - gamma), c_fn gamma}.
CostCheck check_costs(const CostParams& cp, double gamma);
// Throws ValidationError with both bounds when check_costs fails.
void validate_costs(const CostParams& cp, double gamma);

}  // namespace ballad

#endif  // BALLAD_DATA_HPP_
