// Copyright 2026 The bfsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "bfsim/bfsim.h"
#include "doctest.h"
#include "json.hpp"

using nlohmann::json;

namespace {

std::string Take(char* s) {
  std::string r = s ? s : "";
  bfs_string_free(s);
  return r;
}

}  // namespace

TEST_CASE("status names and argument errors") {
  CHECK(std::strlen(bfs_version()) > 0);
  CHECK(std::string(bfs_status_name(BFS_OK)) == "ok");
  bfs_rule* rule = nullptr;
  CHECK(bfs_rule_new("nonsense", &rule) != BFS_OK);
  CHECK(rule == nullptr);
  CHECK(std::strlen(bfs_last_error()) > 0);
  CHECK(bfs_rule_new("bf", nullptr) == BFS_INVALID_ARGUMENT);
  CHECK(bfs_process_step(nullptr, nullptr) == BFS_INVALID_ARGUMENT);
  char* out = nullptr;
  CHECK(bfs_simulate_json("{not json", 0, &out) == BFS_INVALID_INPUT);
  CHECK(bfs_simulate_json(R"({"n": 100, "t": [0.1], "bogus_key": 1})", 0, &out) == BFS_INVALID_INPUT);
  CHECK(out == nullptr);
}

TEST_CASE("process events follow the selection rule") {
  bfs_rule* rule = nullptr;
  REQUIRE(bfs_rule_new("bf", &rule) == BFS_OK);
  bfs_process* p = nullptr;
  REQUIRE(bfs_process_new(500, rule, 77, &p) == BFS_OK);
  bfs_process* twin = nullptr;
  REQUIRE(bfs_process_new(500, rule, 77, &twin) == BFS_OK);

  // Independent bookkeeping of touched vertices.
  std::vector<bool> touched(500, false);
  for (int i = 0; i < 400; ++i) {
    bfs_edge_event e{}, f{};
    REQUIRE(bfs_process_step(p, &e) == BFS_OK);
    REQUIRE(bfs_process_step(twin, &f) == BFS_OK);
    CHECK(std::memcmp(&e, &f, sizeof e) == 0);
    CHECK(e.step == static_cast<uint64_t>(i + 1));
    const bool isolated_pair =
        e.first[0] != e.first[1] && !touched[e.first[0]] && !touched[e.first[1]];
    CHECK(e.was_first_isolated_pair == (isolated_pair ? 1 : 0));
    const uint32_t* expect = isolated_pair ? e.first : e.second;
    CHECK(e.chosen[0] == expect[0]);
    CHECK(e.chosen[1] == expect[1]);
    touched[e.chosen[0]] = touched[e.chosen[1]] = true;
  }
  bfs_process_stats st{};
  REQUIRE(bfs_process_stats_get(p, &st) == BFS_OK);
  CHECK(st.m == 400);
  std::size_t untouched = 0;
  for (bool b : touched) untouched += !b;
  CHECK(st.isolated == untouched);

  const json census = json::parse(Take([&] {
    char* s = nullptr;
    REQUIRE(bfs_process_census_json(p, 4, &s) == BFS_OK);
    return s;
  }()));
  CHECK(census["m"] == 400);

  bfs_process_free(p);
  bfs_process_free(twin);
  bfs_rule_free(rule);
}

TEST_CASE("uniform-edge trajectory matches the closed form") {
  bfs_trajectory* traj = nullptr;
  REQUIRE(bfs_trajectory_solve(1.0, 1e-3, 1, &traj) == BFS_OK);
  for (double t : {0.0, 0.25, 0.5, 1.0}) {
    double rho = 0;
    REQUIRE(bfs_trajectory_rho1(traj, t, &rho) == BFS_OK);
    CHECK(rho == doctest::Approx(std::exp(-2 * t)).epsilon(1e-9));
  }
  double rho = 0;
  CHECK(bfs_trajectory_rho1(traj, 5.0, &rho) == BFS_INVALID_ARGUMENT);
  bfs_trajectory_free(traj);
}

TEST_CASE("fit recovers synthetic parameters") {
  const double delta = 0.03, gamma = 0.4;
  json table = json::object();
  for (int k = 5; k <= 40; ++k) {
    const double v = gamma * std::pow(k, -1.5) * std::exp(-delta * k);
    table[std::to_string(k)] = {v, 0.01 * v};
  }
  char* out = nullptr;
  REQUIRE(bfs_fit_json(table.dump().c_str(), 0.7, 5, 40, &out) == BFS_OK);
  const json fit = json::parse(Take(out));
  CHECK(fit["delta"].get<double>() == doctest::Approx(delta).epsilon(1e-9));
  CHECK(fit["gamma"].get<double>() == doctest::Approx(gamma).epsilon(1e-9));
}

TEST_CASE("simulate output is reproducible from its echoed config") {
  char* out = nullptr;
  REQUIRE(bfs_simulate_json(R"({"n": 2000, "t": [0.3, 0.6], "replicas": 3, "seed": 5})", 0,
                            &out) == BFS_OK);
  const json first = json::parse(Take(out));
  CHECK(first["schema"] == "bfsim.simulate/1");
  REQUIRE(bfs_simulate_json(first["config"].dump().c_str(), 0, &out) == BFS_OK);
  const json second = json::parse(Take(out));
  CHECK(first == second);
}
