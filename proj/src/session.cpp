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

#include "ballad/session.hpp"

#include <charconv>
#include <random>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "ballad/error.hpp"
#include "ballad/experiment.hpp"
#include "httplib.h"

namespace ballad {

using nlohmann::json;

namespace {

json record_json(const RoundRecord& r) {
  return json{{"round", r.round},
              {"side", to_string(r.side)},
              {"reward_AL", r.reward_al},
              {"reward_LR", r.reward_lr},
              {"tau", r.tau},
              {"test_cost", r.test_cost},
              {"cumulative_labels", r.cumulative_labels},
              {"queried_indices", r.queried}};
}

std::string_view to_string(OracleMode m) { return m == OracleMode::kHuman ? "human-oracle" : "simulated-oracle"; }

OracleMode parse_mode(std::string_view s) {
  if (s == "human" || s == "human-oracle") return OracleMode::kHuman;
  if (s == "simulated" || s == "simulated-oracle") return OracleMode::kSimulated;
  throw ValidationError(fmt::format("unknown oracle mode '{}'", s));
}

template <typename T>
T get_or(const json& body, const char* key, T fallback) {
  if (!body.contains(key) || body[key].is_null()) return fallback;
  try {
    return body[key].get<T>();
  } catch (const json::exception&) {
    throw ValidationError(fmt::format("field '{}' has the wrong type", key));
  }
}

ExperimentConfig report_config(const AllocationLoop& loop, const RunOptions& run) {
  ExperimentConfig cfg;
  cfg.strategies = {run.strategy};
  cfg.reward_kind = run.reward_kind;
  cfg.budget_frac = run.budget_frac;
  cfg.round_frac = run.round_frac;
  cfg.repetitions = 1;
  cfg.seed = run.seed;
  cfg.c_fp = loop.config().costs.c_fp;
  cfg.c_fn = loop.config().costs.c_fn;
  cfg.c_r = loop.config().costs.c_r;
  cfg.cost_variant = run.cost_variant;
  return cfg;
}

}  // namespace

Session::Session(std::string id, std::shared_ptr<const Dataset> ds, const SessionSettings& settings)
    : id_(std::move(id)),
      mode_(settings.mode),
      dataset_name_(settings.dataset_name),
      ds_(ds),
      run_(settings.run),
      loop_([&] {
        SplitView split = stratified_split(*ds, settings.run.seed);
        AllocationConfig cfg = make_config(settings.run, split);
        return AllocationLoop(ds, std::move(split), std::move(cfg));
      }()),
      created_at_(std::chrono::system_clock::now()) {
  publish();
}

void Session::publish() {
  auto snap = std::make_shared<Snapshot>();
  const auto pending = loop_.pending();
  const auto& ledger = loop_.ledger();
  const bool complete = !pending.has_value();
  const char* status = complete ? "complete" : "awaiting-labels";

  json history = json::array();
  for (const auto& r : loop_.history()) history.push_back(record_json(r));
  const double cost =
      loop_.history().empty() ? loop_.initial_test_cost() : loop_.history().back().test_cost;
  snap->summary = json{
      {"id", id_},
      {"mode", to_string(mode_)},
      {"status", status},
      {"dataset", dataset_name_},
      {"strategy", to_string(loop_.config().strategy)},
      {"reward_kind", to_string(loop_.config().reward_kind)},
      {"round", ledger.rounds_done},
      {"rounds_total", ledger.rounds_total()},
      {"budget_spent", ledger.spent},
      {"budget_total", ledger.total},
      {"per_round", ledger.per_round},
      {"reward_AL", loop_.reward_al().value},
      {"reward_LR", loop_.reward_lr().value},
      {"tau", loop_.tau_state().tau},
      {"tau_source", to_string(loop_.tau_state().source)},
      {"test_cost", cost},
      {"c_r", loop_.config().costs.c_r},
      {"created_at", std::chrono::duration_cast<std::chrono::seconds>(
                         created_at_.time_since_epoch())
                         .count()},
      {"history", std::move(history)}};

  json rows = json::array();
  json indices = json::array();
  if (pending) {
    for (Index i : pending->indices) {
      indices.push_back(i);
      auto r = ds_->features.row(i);
      rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
  }
  snap->queries = json{{"status", status},
                       {"round", pending ? pending->round : ledger.rounds_done},
                       {"side", pending ? json(to_string(pending->side)) : json(nullptr)},
                       {"indices", std::move(indices)},
                       {"rows", std::move(rows)},
                       {"reward_AL", loop_.reward_al().value},
                       {"reward_LR", loop_.reward_lr().value},
                       {"tau", loop_.tau_state().tau}};

  ExperimentReport report;
  DatasetInfo info{dataset_name_, ds_->size(), ds_->dims(), ds_->gamma, loop_.config().costs,
                   ledger.total, ledger.per_round};
  report.datasets.push_back(info);
  report.runs.push_back(RunResult{dataset_name_, loop_.config().strategy, loop_.config().reward_kind,
                                  0, run_.seed, loop_.history()});
  snap->report = format_rounds_csv(report, report_config(loop_, run_));

  std::lock_guard lock(snapshot_mutex_);
  snapshot_ = std::move(snap);
}

json Session::summary() const {
  std::lock_guard lock(snapshot_mutex_);
  return snapshot_->summary;
}

json Session::queries() const {
  std::lock_guard lock(snapshot_mutex_);
  return snapshot_->queries;
}

std::string Session::report_csv() const {
  std::lock_guard lock(snapshot_mutex_);
  return snapshot_->report;
}

json Session::submit_labels(const json& body) {
  std::unique_lock lock(mutate_, std::try_to_lock);
  if (!lock.owns_lock()) throw ServiceError(409, "another request is updating this session");
  if (!body.is_object() || !body.contains("labels") || !body["labels"].is_object()) {
    throw ServiceError(422, "body must be {\"labels\": {index: label}}");
  }
  std::map<Index, long long> raw;
  for (const auto& [key, value] : body["labels"].items()) {
    Index idx = 0;
    auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), idx);
    if (ec != std::errc() || ptr != key.data() + key.size()) {
      throw ServiceError(422, fmt::format("'{}' is not a row index", key));
    }
    if (!value.is_number_integer()) throw ServiceError(422, fmt::format("label for {} is not an integer", key));
    raw.emplace(idx, value.get<long long>());
  }

  const auto pending = loop_.pending();
  if (!pending) throw ServiceError(409, "no batch is awaiting labels");
  std::vector<Index> expected = pending->indices;
  std::sort(expected.begin(), expected.end());
  std::vector<Index> got;
  for (const auto& [idx, y] : raw) got.push_back(idx);
  if (got != expected) {
    throw ServiceError(409, json{{"error", "labels must cover exactly the pending indices"},
                                 {"expected", expected}}
                                .dump());
  }
  std::map<Index, Label> labels;
  for (const auto& [idx, y] : raw) {
    if (y != 0 && y != 1) throw ServiceError(422, fmt::format("label for {} must be 0 or 1", idx));
    labels.emplace(idx, static_cast<Label>(y));
  }
  loop_.commit(labels);
  publish();
  return summary();
}

json Session::autostep(int rounds) {
  std::unique_lock lock(mutate_, std::try_to_lock);
  if (!lock.owns_lock()) throw ServiceError(409, "another request is updating this session");
  if (mode_ != OracleMode::kSimulated) {
    throw ServiceError(409, "autostep needs a simulated-oracle session");
  }
  if (rounds < 0) throw ServiceError(422, "rounds must be non-negative");
  const Oracle oracle = simulated_oracle(ds_);
  for (int r = 0; r < rounds && !loop_.done(); ++r) {
    if (!loop_.pending()) break;
    loop_.step(oracle);
  }
  publish();
  return summary();
}

json SessionManager::create(const json& body) {
  if (!body.is_object()) throw ServiceError(400, "body must be a JSON object");
  std::optional<double> gamma;
  if (body.contains("gamma") && !body["gamma"].is_null()) {
    gamma = get_or<double>(body, "gamma", 0.0);
    if (!(*gamma > 0.0 && *gamma < 1.0)) throw ServiceError(422, "gamma must be in (0,1)");
  }
  Dataset ds;
  std::string name = get_or<std::string>(body, "name", "");
  if (body.contains("csv")) {
    ds = parse_dataset(get_or<std::string>(body, "csv", ""), name.empty() ? "inline" : name, gamma);
  } else if (body.contains("path")) {
    ds = load_dataset(get_or<std::string>(body, "path", ""), gamma);
    if (!name.empty()) ds.name = name;
  } else {
    throw ServiceError(422, "provide either 'csv' or 'path'");
  }

  SessionSettings settings;
  settings.dataset_name = ds.name;
  settings.mode = parse_mode(get_or<std::string>(body, "mode", "human"));
  RunOptions& run = settings.run;
  run.strategy = parse_strategy(get_or<std::string>(body, "strategy", "ballad"));
  run.reward_kind = parse_reward_kind(get_or<std::string>(body, "reward", "entropy"));
  run.budget_frac = get_or<double>(body, "budget_frac", 0.30);
  run.round_frac = get_or<double>(body, "round_frac", 0.02);
  run.seed = get_or<std::uint64_t>(body, "seed", 0);
  run.cost_variant = parse_cost_variant(get_or<std::string>(body, "cost_variant", "per-example"));
  run.costs.c_fp = get_or<double>(body, "cfp", 1.0);
  run.costs.c_fn = get_or<double>(body, "cfn", 1.0);
  run.costs.c_r = ds.gamma;
  if (body.contains("cr") && !(body["cr"].is_string() && body["cr"].get<std::string>() == "auto")) {
    run.costs.c_r = get_or<double>(body, "cr", ds.gamma);
  }
  validate_costs(run.costs, ds.gamma);

  auto dataset = std::make_shared<const Dataset>(std::move(ds));
  std::string id;
  {
    std::unique_lock lock(mutex_);
    std::random_device rd;
    id = fmt::format("s{:x}{:08x}", ++counter_, rd());
  }
  auto session = std::make_shared<Session>(id, dataset, settings);
  {
    std::unique_lock lock(mutex_);
    sessions_.emplace(id, session);
  }
  return session->summary();
}

std::shared_ptr<Session> SessionManager::find(const std::string& id) const {
  std::shared_lock lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ServiceError(404, fmt::format("no session '{}'", id));
  return it->second;
}

namespace {

void send_error(httplib::Response& res, int status, const std::string& message) {
  res.status = status;
  json body;
  auto parsed = json::parse(message, nullptr, false);
  if (parsed.is_object()) {
    body = std::move(parsed);
  } else {
    body = json{{"error", message}};
  }
  res.set_content(body.dump(), "application/json");
}

template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const ServiceError& e) {
    send_error(res, e.status(), e.what());
  } catch (const json::exception& e) {
    send_error(res, 400, e.what());
  } catch (const ContractError& e) {
    send_error(res, 409, e.what());
  } catch (const ParseError& e) {
    send_error(res, 422, e.what());
  } catch (const ValidationError& e) {
    send_error(res, 422, e.what());
  } catch (const SizeError& e) {
    send_error(res, 422, e.what());
  } catch (const BudgetError& e) {
    send_error(res, 422, e.what());
  } catch (const DomainError& e) {
    send_error(res, 422, e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, e.what());
  }
}

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  return json::parse(req.body);
}

}  // namespace

void install_routes(httplib::Server& server, SessionManager& manager) {
  server.Post("/sessions", [&manager](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, manager.create(parse_body(req)), 201); });
  });
  server.Get(R"(/sessions/([^/]+))", [&manager](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, manager.find(req.matches[1])->summary()); });
  });
  server.Get(R"(/sessions/([^/]+)/queries)",
             [&manager](const httplib::Request& req, httplib::Response& res) {
               guarded(res, [&] { send_json(res, manager.find(req.matches[1])->queries()); });
             });
  server.Get(R"(/sessions/([^/]+)/report)",
             [&manager](const httplib::Request& req, httplib::Response& res) {
               guarded(res, [&] {
                 res.set_content(manager.find(req.matches[1])->report_csv(), "text/csv");
               });
             });
  server.Post(R"(/sessions/([^/]+)/labels)",
              [&manager](const httplib::Request& req, httplib::Response& res) {
                guarded(res, [&] {
                  auto session = manager.find(req.matches[1]);
                  send_json(res, session->submit_labels(parse_body(req)));
                });
              });
  server.Post(R"(/sessions/([^/]+)/autostep)",
              [&manager](const httplib::Request& req, httplib::Response& res) {
                guarded(res, [&] {
                  auto session = manager.find(req.matches[1]);
                  const json body = parse_body(req);
                  send_json(res, session->autostep(get_or<int>(body, "rounds", 1)));
                });
              });
}

void serve(const std::string& host, int port) {
  httplib::Server server;
  SessionManager manager;
  install_routes(server, manager);
  spdlog::info("serving allocation sessions on {}:{}", host, port);
  if (!server.listen(host, port)) throw Error(fmt::format("cannot listen on {}:{}", host, port));
}

}  // namespace ballad
