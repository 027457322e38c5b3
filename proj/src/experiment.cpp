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

#include "ballad/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <random>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "ballad/error.hpp"

namespace ballad {

Dataset generate_synthetic(std::size_t n, std::size_t d, double gamma, std::uint64_t seed) {
  if (d < 1) throw ValidationError("synthetic data needs at least one feature");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError("gamma must be in (0,1)");
  const auto n_anom = static_cast<std::size_t>(std::llround(static_cast<double>(n) * gamma));
  if (n_anom < 3 || n_anom >= n) {
    throw ValidationError(
        fmt::format("n={} with gamma={} gives {} anomalies; at least 3 are needed", n, gamma, n_anom));
  }
  const std::size_t n_in = n - n_anom;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Matrix x(n, d);
  std::vector<double> lo(d, 0.0);
  std::vector<double> hi(d, 0.0);
  for (std::size_t i = 0; i < n_in; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double v = normal(rng);
      x(i, j) = v;
      lo[j] = i == 0 ? v : std::min(lo[j], v);
      hi[j] = i == 0 ? v : std::max(hi[j], v);
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    const double center = 0.5 * (lo[j] + hi[j]);
    const double half = 2.5 * (hi[j] - lo[j]);
    std::uniform_real_distribution<double> box(center - half, center + half);
    for (std::size_t i = n_in; i < n; ++i) x(i, j) = box(rng);
  }

  std::vector<Index> order(n);
  for (Index i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);

  Dataset ds;
  ds.name = fmt::format("synthetic-n{}-d{}-s{}", n, d, seed);
  ds.features = x.select_rows(order);
  ds.truth.resize(n);
  for (std::size_t i = 0; i < n; ++i) ds.truth[i] = order[i] >= n_in ? 1 : 0;
  ds.gamma = static_cast<double>(n_anom) / static_cast<double>(n);
  validate_dataset(ds);
  return ds;
}

void ExperimentConfig::validate() const {
  if (!(budget_frac > 0.0 && budget_frac <= 1.0)) throw ValidationError("budget fraction must be in (0,1]");
  if (!(round_frac > 0.0 && round_frac <= 1.0)) throw ValidationError("round fraction must be in (0,1]");
  if (repetitions < 1) throw ValidationError("repetitions must be at least 1");
  if (strategies.empty()) throw ValidationError("no strategy selected");
  if (c_fp < 0.0 || c_fn < 0.0 || (c_r && *c_r < 0.0)) throw ValidationError("costs must be non-negative");
  if (jobs < 1) throw ValidationError("jobs must be at least 1");
}

namespace {

CostParams resolve_costs(const ExperimentConfig& config, double gamma) {
  CostParams cp{config.c_fp, config.c_fn, config.c_r.value_or(gamma)};
  validate_costs(cp, gamma);
  return cp;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config,
                                const std::vector<std::shared_ptr<const Dataset>>& datasets) {
  config.validate();
  ExperimentReport report;

  struct Task {
    std::size_t dataset;
    Strategy strategy;
    int repetition;
    RunOptions opts;
  };
  std::vector<Task> tasks;
  std::vector<std::shared_ptr<const Dataset>> usable;
  for (const auto& ds : datasets) {
    try {
      DatasetInfo info{ds->name, ds->size(), ds->dims(), ds->gamma, resolve_costs(config, ds->gamma)};
      const SplitView probe = stratified_split(*ds, config.seed);
      const BudgetLedger budget = make_budget(probe.train.size(), config.budget_frac, config.round_frac);
      info.total_budget = budget.total;
      info.per_round = budget.per_round;
      const std::size_t slot = usable.size();
      usable.push_back(ds);
      report.datasets.push_back(info);
      for (Strategy s : config.strategies) {
        for (int r = 0; r < config.repetitions; ++r) {
          RunOptions o;
          o.strategy = s;
          o.reward_kind = config.reward_kind;
          o.budget_frac = config.budget_frac;
          o.round_frac = config.round_frac;
          o.costs = info.costs;
          o.cost_variant = config.cost_variant;
          o.reject_rule = config.reject_rule;
          o.entropy_form = config.entropy_form;
          o.detector = config.detector;
          o.seed = config.seed + static_cast<std::uint64_t>(r);
          tasks.push_back({slot, s, r, o});
        }
      }
    } catch (const std::exception& e) {
      report.failures.push_back(fmt::format("{}: {}", ds->name, e.what()));
    }
  }

  std::vector<RunResult> results(tasks.size());
  std::vector<std::string> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks.size(); t = next++) {
      const Task& task = tasks[t];
      try {
        results[t] = RunResult{usable[task.dataset]->name, task.strategy, config.reward_kind,
                               task.repetition, task.opts.seed, run(usable[task.dataset], task.opts)};
      } catch (const std::exception& e) {
        errors[t] = e.what();
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(config.jobs, static_cast<int>(tasks.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // A failed run disqualifies its whole dataset.
  std::vector<bool> bad(usable.size(), false);
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    if (!errors[t].empty() && !bad[tasks[t].dataset]) {
      bad[tasks[t].dataset] = true;
      report.failures.push_back(fmt::format("{}: {}", usable[tasks[t].dataset]->name, errors[t]));
    }
  }
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    if (!bad[tasks[t].dataset]) report.runs.push_back(std::move(results[t]));
  }
  std::vector<DatasetInfo> kept;
  for (std::size_t k = 0; k < usable.size(); ++k) {
    if (!bad[k]) kept.push_back(report.datasets[k]);
  }
  report.datasets = std::move(kept);
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  std::vector<std::shared_ptr<const Dataset>> loaded;
  std::vector<std::string> load_failures;
  for (const auto& path : config.datasets) {
    try {
      loaded.push_back(std::make_shared<const Dataset>(load_dataset(path)));
    } catch (const std::exception& e) {
      load_failures.push_back(fmt::format("{}: {}", path.string(), e.what()));
      spdlog::error("skipping {}: {}", path.string(), e.what());
    }
  }
  ExperimentReport report = run_experiment(config, loaded);
  report.failures.insert(report.failures.begin(), load_failures.begin(), load_failures.end());
  return report;
}

std::string format_run_rows(const std::string& dataset, Strategy strategy, RewardKind kind,
                            int repetition, const std::vector<RoundRecord>& history) {
  std::string out;
  for (const auto& r : history) {
    out += fmt::format("{},{},{},{},{}\n", dataset, to_string(strategy), to_string(kind), repetition,
                       format_history_row(r));
  }
  return out;
}

std::string format_rounds_csv(const ExperimentReport& report, const ExperimentConfig& config) {
  std::string out = fmt::format(
      "# reward_kind={} budget_frac={} round_frac={} repetitions={} seed={} cost_variant={}\n",
      to_string(config.reward_kind), config.budget_frac, config.round_frac, config.repetitions,
      config.seed, to_string(config.cost_variant));
  for (const auto& d : report.datasets) {
    out += fmt::format(
        "# dataset={} n={} d={} gamma={} c_fp={} c_fn={} c_r={} budget={} per_round={}\n", d.name, d.n,
        d.d, d.gamma, d.costs.c_fp, d.costs.c_fn, d.costs.c_r, d.total_budget, d.per_round);
  }
  out += fmt::format("{},{}\n", kRoundsKeyColumns, kHistoryColumns);
  for (const auto& run : report.runs) {
    out += format_run_rows(run.dataset, run.strategy, run.reward_kind, run.repetition, run.history);
  }
  return out;
}

std::vector<SummaryRow> summarize(const ExperimentReport& report, const ExperimentConfig& config) {
  std::vector<CostCurve> curves;
  curves.reserve(report.runs.size());
  for (const auto& run : report.runs) {
    CostCurve c{std::string(to_string(run.strategy)), std::string(to_string(run.reward_kind)), {}};
    for (const auto& r : run.history) c.costs.push_back(r.test_cost);
    curves.push_back(std::move(c));
  }
  if (curves.empty()) return {};
  return aggregate(curves, config.round_frac * 100.0);
}

void write_reports(const ExperimentReport& report, const ExperimentConfig& config) {
  std::filesystem::create_directories(config.out_dir);
  {
    std::ofstream out(config.out_dir / "rounds.csv", std::ios::binary);
    if (!out) throw Error("cannot write " + (config.out_dir / "rounds.csv").string());
    out << format_rounds_csv(report, config);
  }
  std::ofstream out(config.out_dir / "summary.csv", std::ios::binary);
  if (!out) throw Error("cannot write " + (config.out_dir / "summary.csv").string());
  out << format_summary_csv(summarize(report, config));
}

}  // namespace ballad
