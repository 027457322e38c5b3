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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ballad/allocation.hpp"
#include "ballad/data.hpp"
#include "ballad/detector.hpp"
#include "ballad/error.hpp"
#include "ballad/evaluation.hpp"
#include "ballad/experiment.hpp"
#include "ballad/isolation_forest.hpp"
#include "ballad/rejection.hpp"
#include "ballad/rewards.hpp"

namespace py = pybind11;
using namespace ballad;

namespace {

Prediction parse_prediction(const std::string& s) {
  if (s == "anomaly") return Prediction::kAnomaly;
  if (s == "normal") return Prediction::kNormal;
  if (s == "reject") return Prediction::kReject;
  throw ValidationError("prediction must be 'anomaly', 'normal' or 'reject'");
}

std::string prediction_name(Prediction p) {
  switch (p) {
    case Prediction::kAnomaly:
      return "anomaly";
    case Prediction::kNormal:
      return "normal";
    case Prediction::kReject:
      return "reject";
  }
  return "?";
}

Matrix to_matrix(const std::vector<std::vector<double>>& rows) {
  const std::size_t d = rows.empty() ? 0 : rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * d);
  for (const auto& r : rows) {
    if (r.size() != d) throw ContractError("ragged feature rows");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return Matrix(rows.size(), d, std::move(flat));
}

std::vector<std::vector<double>> to_rows(const Matrix& m) {
  std::vector<std::vector<double>> out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) out[i].assign(m.row(i).begin(), m.row(i).end());
  return out;
}

py::dict record_dict(const RoundRecord& r) {
  py::dict d;
  d["round"] = r.round;
  d["side"] = std::string(to_string(r.side));
  d["reward_AL"] = r.reward_al;
  d["reward_LR"] = r.reward_lr;
  d["tau"] = r.tau;
  d["test_cost"] = r.test_cost;
  d["test_auc"] = r.test_auc;
  d["cumulative_labels"] = r.cumulative_labels;
  d["queried_indices"] = r.queried;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Label budget allocation between active learning and learning to reject";

  py::register_exception<Error>(m, "BalladError", PyExc_ValueError);

  py::class_<Dataset, std::shared_ptr<Dataset>>(m, "Dataset")
      .def_readonly("name", &Dataset::name)
      .def_readonly("gamma", &Dataset::gamma)
      .def_property_readonly("n", &Dataset::size)
      .def_property_readonly("d", &Dataset::dims)
      .def_property_readonly("features", [](const Dataset& ds) { return to_rows(ds.features); })
      .def_property_readonly("labels", [](const Dataset& ds) {
        return std::vector<int>(ds.truth.begin(), ds.truth.end());
      });

  m.def("load_dataset",
        [](const std::string& path, std::optional<double> gamma) {
          return std::make_shared<Dataset>(load_dataset(path, gamma));
        },
        py::arg("path"), py::arg("gamma") = py::none());
  m.def("generate_synthetic",
        [](std::size_t n, std::size_t d, double gamma, std::uint64_t seed) {
          return std::make_shared<Dataset>(generate_synthetic(n, d, gamma, seed));
        },
        py::arg("n"), py::arg("d"), py::arg("gamma"), py::arg("seed") = 0);
  m.def("write_dataset", [](const Dataset& ds, const std::string& path) { write_dataset(ds, path); });

  m.def("stratified_split",
        [](const Dataset& ds, std::uint64_t seed) {
          auto s = stratified_split(ds, seed);
          py::dict d;
          d["train"] = s.train;
          d["val"] = s.val;
          d["test"] = s.test;
          d["stratified"] = s.stratified;
          return d;
        },
        py::arg("dataset"), py::arg("seed") = 0);

  m.def("check_costs",
        [](double c_fp, double c_fn, double c_r, double gamma) {
          return check_costs(CostParams{c_fp, c_fn, c_r}, gamma).ok;
        },
        py::arg("c_fp"), py::arg("c_fn"), py::arg("c_r"), py::arg("gamma"));

  m.def("squash", &squash, py::arg("s"), py::arg("lam"));
  m.def("quantile_threshold",
        [](const std::vector<double>& scores, double gamma) { return quantile_threshold(scores, gamma); },
        py::arg("scores"), py::arg("gamma"));
  m.def("confidence", &confidence, py::arg("p"));
  m.def("reject_probability", &reject_probability, py::arg("conf"), py::arg("tau"));
  m.def("predict_trinary",
        [](double p, double tau) { return prediction_name(predict_trinary(p, tau)); },
        py::arg("p"), py::arg("tau"));
  m.def("rejection_rate",
        [](const std::vector<double>& p, double tau) { return rejection_rate(p, tau); });
  m.def("optimize_tau",
        [](const std::vector<double>& pool, const std::vector<std::pair<std::size_t, int>>& labeled,
           double c_fp, double c_fn, double c_r, double cap) {
          std::vector<std::pair<std::size_t, Label>> l;
          for (const auto& [i, y] : labeled) l.emplace_back(i, static_cast<Label>(y));
          return optimize_tau(pool, l, CostParams{c_fp, c_fn, c_r}, cap).tau;
        },
        py::arg("pool_posteriors"), py::arg("labeled"), py::arg("c_fp") = 1.0,
        py::arg("c_fn") = 1.0, py::arg("c_r"), py::arg("cap") = kDefaultRejectionCap);

  m.def("entropy_term",
        [](double p, bool binary) {
          return entropy_term(p, binary ? EntropyForm::kBinary : EntropyForm::kSingleTerm);
        },
        py::arg("p"), py::arg("binary") = false);
  m.def("entropy_reward",
        [](const std::vector<double>& prev, const std::vector<double>& curr) {
          return entropy_reward(prev, curr);
        });
  m.def("binarize", [](const std::vector<double>& p) {
    auto b = binarize(p);
    return std::vector<int>(b.begin(), b.end());
  });
  m.def("cosine_reward", [](const std::vector<int>& prev, const std::vector<int>& curr) {
    std::vector<std::uint8_t> a(prev.begin(), prev.end());
    std::vector<std::uint8_t> b(curr.begin(), curr.end());
    return cosine_reward(a, b);
  });

  m.def("empirical_cost",
        [](const std::vector<std::string>& preds, const std::vector<int>& labels, double c_fp,
           double c_fn, double c_r, const std::string& variant) {
          std::vector<Prediction> p;
          for (const auto& s : preds) p.push_back(parse_prediction(s));
          std::vector<Label> y(labels.begin(), labels.end());
          return empirical_cost(p, y, CostParams{c_fp, c_fn, c_r}, parse_cost_variant(variant)).cost;
        },
        py::arg("preds"), py::arg("labels"), py::arg("c_fp") = 1.0, py::arg("c_fn") = 1.0,
        py::arg("c_r"), py::arg("variant") = "per-example");
  m.def("auc", [](const std::vector<double>& scores, const std::vector<int>& labels) {
    std::vector<Label> y(labels.begin(), labels.end());
    return auc(scores, y);
  });

  m.def("iforest_scores",
        [](const std::vector<std::vector<double>>& x, int n_trees, std::size_t subsample,
           std::uint64_t seed) {
          const Matrix mx = to_matrix(x);
          return IsolationForest::fit(mx, {n_trees, subsample, seed}).score_all(mx);
        },
        py::arg("x"), py::arg("n_trees") = 100, py::arg("subsample") = 256, py::arg("seed") = 0);

  m.def("run",
        [](std::shared_ptr<Dataset> ds, const std::string& strategy, const std::string& reward,
           double budget_frac, double round_frac, double c_fp, double c_fn,
           std::optional<double> c_r, std::uint64_t seed) {
          RunOptions o;
          o.strategy = parse_strategy(strategy);
          o.reward_kind = parse_reward_kind(reward);
          o.budget_frac = budget_frac;
          o.round_frac = round_frac;
          o.costs = CostParams{c_fp, c_fn, c_r.value_or(ds->gamma)};
          o.seed = seed;
          std::vector<RoundRecord> history;
          {
            py::gil_scoped_release release;
            history = run(ds, o);
          }
          py::list out;
          for (const auto& r : history) out.append(record_dict(r));
          return out;
        },
        py::arg("dataset"), py::arg("strategy") = "ballad", py::arg("reward") = "entropy",
        py::arg("budget_frac") = 0.30, py::arg("round_frac") = 0.02, py::arg("c_fp") = 1.0,
        py::arg("c_fn") = 1.0, py::arg("c_r") = py::none(), py::arg("seed") = 0);

#ifdef BALLAD_VERSION
  m.attr("__version__") = BALLAD_VERSION;
#else
  m.attr("__version__") = "dev";
#endif
}
