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

// Interactive allocation sessions over HTTP + JSON.
//
//   POST /sessions                 create (201)
//   GET  /sessions/{id}            summary
//   GET  /sessions/{id}/queries    pending batch
//   POST /sessions/{id}/labels     commit labels for the pending batch
//   POST /sessions/{id}/autostep   answer rounds from ground truth
//   GET  /sessions/{id}/report     per-round CSV

#ifndef BALLAD_SESSION_HPP_
#define BALLAD_SESSION_HPP_

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>

#include <nlohmann/json.hpp>

#include "ballad/allocation.hpp"
#include "ballad/error.hpp"

namespace httplib {
class Server;
}

namespace ballad {

enum class OracleMode { kHuman, kSimulated };

// Error carrying the HTTP status the service should answer with.
class ServiceError : public Error {
 public:
  ServiceError(int status, const std::string& what) : Error(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

struct SessionSettings {
  RunOptions run;
  OracleMode mode = OracleMode::kHuman;
  std::string dataset_name;
};

class Session {
 public:
  Session(std::string id, std::shared_ptr<const Dataset> ds, const SessionSettings& settings);

  const std::string& id() const { return id_; }
  OracleMode mode() const { return mode_; }

  // Read-only views; safe to call while another request mutates the session.
  nlohmann::json summary() const;
  nlohmann::json queries() const;
  std::string report_csv() const;

  // Mutations. Concurrent mutations of one session fail with 409.
  nlohmann::json submit_labels(const nlohmann::json& body);
  nlohmann::json autostep(int rounds);

 private:
  struct Snapshot {
    nlohmann::json summary;
    nlohmann::json queries;
    std::string report;
  };
  void publish();

  std::string id_;
  OracleMode mode_;
  std::string dataset_name_;
  std::shared_ptr<const Dataset> ds_;
  RunOptions run_;
  AllocationLoop loop_;
  std::chrono::system_clock::time_point created_at_;

  std::mutex mutate_;
  mutable std::mutex snapshot_mutex_;
  std::shared_ptr<const Snapshot> snapshot_;
};

class SessionManager {
 public:
  // Body: {"csv": "..."} or {"path": "..."}, plus optional strategy, reward,
  // budget_frac, round_frac, seed, cfp, cfn, cr, cost_variant, gamma, mode.
  nlohmann::json create(const nlohmann::json& body);
  std::shared_ptr<Session> find(const std::string& id) const;

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t counter_ = 0;
};

// Registers the endpoints on `server`.
void install_routes(httplib::Server& server, SessionManager& manager);

// Blocks serving on host:port.
void serve(const std::string& host, int port);

}  // namespace ballad

#endif  // BALLAD_SESSION_HPP_
