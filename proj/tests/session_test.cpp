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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <sys/wait.h>

#include "ballad/data.hpp"
#include "gtest/gtest.h"
#include "httplib.h"

namespace ballad {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string Benchmark(const std::string& name) {
  return (fs::path(BALLAD_SOURCE_DIR) / "data" / "benchmarks" / (name + ".csv")).string();
}

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    install_routes(server_, manager_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }

  void TearDown() override {
    server_.stop();
    thread_.join();
  }

  json Create(const json& body, int expect = 201) {
    auto res = client_->Post("/sessions", body.dump(), "application/json");
    EXPECT_TRUE(res);
    EXPECT_EQ(res->status, expect) << res->body;
    return json::parse(res->body);
  }

  std::pair<int, json> Get(const std::string& path) {
    auto res = client_->Get(path);
    return {res->status, json::parse(res->body)};
  }

  std::pair<int, json> Post(const std::string& path, const std::string& body) {
    auto res = client_->Post(path, body, "application/json");
    return {res->status, json::parse(res->body)};
  }

  httplib::Server server_;
  SessionManager manager_;
  std::thread thread_;
  int port_ = 0;
  std::unique_ptr<httplib::Client> client_;
};

json LabelsFor(const json& queries, const Dataset& ds) {
  json labels = json::object();
  for (const auto& i : queries["indices"]) {
    const auto idx = i.get<std::size_t>();
    labels[std::to_string(idx)] = static_cast<int>(ds.truth[idx]);
  }
  return json{{"labels", labels}};
}

TEST_F(ServiceTest, CreateAndInspect) {
  const json s = Create({{"path", Benchmark("glass")}, {"seed", 3}});
  EXPECT_EQ(s["status"], "awaiting-labels");
  EXPECT_EQ(s["mode"], "human-oracle");
  EXPECT_EQ(s["dataset"], "glass");
  EXPECT_EQ(s["strategy"], "ballad");
  EXPECT_EQ(s["round"], 0);
  EXPECT_EQ(s["rounds_total"], 13);
  EXPECT_EQ(s["budget_total"], 26);
  EXPECT_EQ(s["per_round"], 2);
  EXPECT_DOUBLE_EQ(s["tau"].get<double>(), 0.1);
  EXPECT_DOUBLE_EQ(s["c_r"].get<double>(), 9.0 / 214.0);

  const auto id = s["id"].get<std::string>();
  auto [code, summary] = Get("/sessions/" + id);
  EXPECT_EQ(code, 200);
  EXPECT_EQ(summary["id"], id);

  auto [qcode, q] = Get("/sessions/" + id + "/queries");
  EXPECT_EQ(qcode, 200);
  EXPECT_EQ(q["side"], "LR");
  ASSERT_EQ(q["indices"].size(), 2u);
  const Dataset ds = load_dataset(Benchmark("glass"));
  const auto first = q["indices"][0].get<std::size_t>();
  EXPECT_EQ(q["rows"][0].get<std::vector<double>>(),
            std::vector<double>(ds.features.row(first).begin(), ds.features.row(first).end()));
}

TEST_F(ServiceTest, HumanLoopToCompletion) {
  const Dataset ds = load_dataset(Benchmark("wbc"));
  const json s = Create({{"path", Benchmark("wbc")}, {"strategy", "all-in-al"}});
  const std::string base = "/sessions/" + s["id"].get<std::string>();
  int rounds = 0;
  while (true) {
    auto [code, q] = Get(base + "/queries");
    ASSERT_EQ(code, 200);
    if (q["status"] == "complete") break;
    auto [lcode, after] = Post(base + "/labels", LabelsFor(q, ds).dump());
    ASSERT_EQ(lcode, 200) << after.dump();
    ++rounds;
    EXPECT_EQ(after["round"], rounds);
    EXPECT_EQ(after["history"].size(), static_cast<std::size_t>(rounds));
  }
  auto [code, summary] = Get(base);
  EXPECT_EQ(summary["status"], "complete");
  EXPECT_EQ(summary["budget_spent"], summary["budget_total"]);
  EXPECT_EQ(summary["tau_source"], "optimized-on-train");
  auto [late, body] = Post(base + "/labels", R"({"labels": {"0": 1}})");
  EXPECT_EQ(late, 409);
  EXPECT_TRUE(body.contains("error"));
}

TEST_F(ServiceTest, LabelErrors) {
  const json s = Create({{"path", Benchmark("glass")}});
  const std::string base = "/sessions/" + s["id"].get<std::string>();
  auto [_, q] = Get(base + "/queries");
  const auto i0 = std::to_string(q["indices"][0].get<std::size_t>());
  const auto i1 = std::to_string(q["indices"][1].get<std::size_t>());

  auto [wrong, wbody] = Post(base + "/labels", json{{"labels", {{i0, 0}}}}.dump());
  EXPECT_EQ(wrong, 409);
  EXPECT_EQ(wbody["expected"].size(), 2u);

  auto [nonbinary, nbody] = Post(base + "/labels", json{{"labels", {{i0, 0}, {i1, 2}}}}.dump());
  EXPECT_EQ(nonbinary, 422);

  auto [badkey, bbody] = Post(base + "/labels", json{{"labels", {{"x", 0}}}}.dump());
  EXPECT_EQ(badkey, 422);

  auto [badjson, jbody] = Post(base + "/labels", "{not json");
  EXPECT_EQ(badjson, 400);

  auto [summary_code, summary] = Get(base);
  EXPECT_EQ(summary["round"], 0);
  EXPECT_EQ(summary["budget_spent"], 0);
}

TEST_F(ServiceTest, UnknownSessionIs404) {
  EXPECT_EQ(Get("/sessions/nope").first, 404);
  EXPECT_EQ(Get("/sessions/nope/queries").first, 404);
  EXPECT_EQ(Post("/sessions/nope/labels", "{}").first, 404);
  EXPECT_EQ(client_->Get("/sessions/nope/report")->status, 404);
}

TEST_F(ServiceTest, CreateValidation) {
  Create({{"path", Benchmark("glass")}, {"gamma", 1.5}}, 422);
  Create({{"path", Benchmark("glass")}, {"cr", 0.5}}, 422);
  Create({{"strategy", "ballad"}}, 422);
  Create({{"csv", "f1,label\n1,0\n"}}, 422);
  Create({{"path", Benchmark("glass")}, {"strategy", "greedy"}}, 422);
  auto res = client_->Post("/sessions", "[1,2", "application/json");
  EXPECT_EQ(res->status, 400);
}

TEST_F(ServiceTest, InlineCsvSession) {
  std::ifstream in(Benchmark("glass"));
  std::stringstream ss;
  ss << in.rdbuf();
  const json s = Create({{"csv", ss.str()}, {"name", "inline-glass"}, {"cr", "auto"}});
  EXPECT_EQ(s["dataset"], "inline-glass");
  EXPECT_DOUBLE_EQ(s["c_r"].get<double>(), 9.0 / 214.0);
}

TEST_F(ServiceTest, AutostepNeedsSimulatedMode) {
  const json human = Create({{"path", Benchmark("glass")}});
  EXPECT_EQ(Post("/sessions/" + human["id"].get<std::string>() + "/autostep", "{}").first, 409);
  const json sim = Create({{"path", Benchmark("glass")}, {"mode", "simulated"}});
  auto [code, after] = Post("/sessions/" + sim["id"].get<std::string>() + "/autostep",
                            R"({"rounds": 3})");
  EXPECT_EQ(code, 200);
  EXPECT_EQ(after["round"], 3);
  EXPECT_EQ(after["history"][2]["queried_indices"].size(), 2u);
}

TEST_F(ServiceTest, ReportMatchesCliRun) {
  const json sim = Create({{"path", Benchmark("glass")}, {"mode", "simulated"}, {"seed", 7},
                           {"reward", "cosine"}});
  const std::string base = "/sessions/" + sim["id"].get<std::string>();
  auto [code, after] = Post(base + "/autostep", R"({"rounds": 100})");
  ASSERT_EQ(code, 200);
  EXPECT_EQ(after["status"], "complete");
  const std::string report = client_->Get(base + "/report")->body;

  const auto dir = fs::temp_directory_path() / "ballad_session_cli";
  fs::remove_all(dir);
  const std::string cmd = std::string(BALLAD_CLI_PATH) + " run --data " + Benchmark("glass") +
                          " --strategy ballad --reward cosine --reps 1 --seed 7 --out " +
                          dir.string() + " > /dev/null 2>&1";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  std::ifstream in(dir / "rounds.csv", std::ios::binary);
  std::stringstream cli;
  cli << in.rdbuf();
  EXPECT_EQ(report, cli.str());
}

TEST_F(ServiceTest, ConcurrentMutationsStayConsistent) {
  const json sim = Create({{"path", Benchmark("wdbc")}, {"mode", "simulated"}});
  const std::string base = "/sessions/" + sim["id"].get<std::string>();
  std::atomic<int> ok{0};
  std::atomic<int> conflict{0};
  std::vector<std::thread> workers;
  for (int t = 0; t < 6; ++t) {
    workers.emplace_back([&] {
      httplib::Client c("127.0.0.1", port_);
      for (int k = 0; k < 3; ++k) {
        auto res = c.Post(base + "/autostep", R"({"rounds": 1})", "application/json");
        if (res && res->status == 200) ++ok;
        if (res && res->status == 409) ++conflict;
        auto g = c.Get(base);
        EXPECT_EQ(g->status, 200);
      }
    });
  }
  for (auto& w : workers) w.join();
  EXPECT_EQ(ok + conflict, 18);
  auto [code, summary] = Get(base);
  const int rounds = summary["round"].get<int>();
  EXPECT_LE(rounds, ok.load());
  EXPECT_EQ(summary["budget_spent"].get<int>(), rounds * summary["per_round"].get<int>());
  EXPECT_EQ(summary["history"].size(), static_cast<std::size_t>(rounds));
}

}  // namespace
}  // namespace ballad
