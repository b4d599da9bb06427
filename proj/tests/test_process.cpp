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
#include <numeric>
#include <vector>

#include "bfsim/error.hpp"
#include "bfsim/process.hpp"
#include "doctest.h"

using namespace bfsim;

namespace {

std::uint64_t SumOfSizes(const ComponentCensus& c) {
  std::uint64_t total = 0;
  for (const auto& [s, cnt] : c.tree_counts) total += s * cnt;
  for (const auto& [s, cnt] : c.nontree_counts) total += s * cnt;
  return total;
}

}  // namespace

TEST_CASE("new process starts empty") {
  ProcessState p(4, RuleSpec::BohmanFrieze(), 1);
  CHECK(p.isolated() == 4);
  CHECK(p.steps() == 0);

  ProcessState two(2, RuleSpec::BohmanFrieze(), 99);
  const auto c = two.Census();
  CHECK(c.tree_counts == std::map<std::uint64_t, std::uint64_t>{{1, 2}});
  CHECK(c.nontree_counts.empty());

  CHECK_THROWS_AS(ProcessState(1, RuleSpec::BohmanFrieze(), 1), Error);
  try {
    ProcessState bad(1, RuleSpec::BohmanFrieze(), 1);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidArgument);
  }
}

TEST_CASE("Bohman-Frieze takes the first edge only between isolated vertices") {
  ProcessState p(6, RuleSpec::BohmanFrieze(), 1);
  auto ev = p.Apply(VertexPair::Of(0, 1), VertexPair::Of(2, 3));
  CHECK(ev.chosen == VertexPair::Of(0, 1));
  CHECK(ev.was_first_isolated_pair);
  CHECK(ev.step == 1);

  // Vertex 0 now sits in a component of size 2.
  ev = p.Apply(VertexPair::Of(0, 4), VertexPair::Of(2, 3));
  CHECK(ev.chosen == VertexPair::Of(2, 3));
  CHECK_FALSE(ev.was_first_isolated_pair);
  CHECK(p.isolated() == 2);
}

TEST_CASE("er_always_second always takes the second candidate") {
  ProcessState p(8, RuleSpec::ErAlwaysSecond(), 3);
  auto ev = p.Apply(VertexPair::Of(0, 1), VertexPair::Of(2, 3));
  CHECK(ev.chosen == VertexPair::Of(2, 3));
  for (int i = 0; i < 50; ++i) {
    ev = p.Step();
    CHECK(ev.chosen == ev.second_candidate);
  }
}

TEST_CASE("decide is a pure table lookup") {
  const auto bf = RuleSpec::BohmanFrieze();
  CHECK(Decide(bf, {1, 1, 1, 2}) == Choice::kFirstEdge);
  CHECK(Decide(bf, {1, 1, 2, 2}) == Choice::kFirstEdge);
  CHECK(Decide(bf, {1, 2, 1, 1}) == Choice::kSecondEdge);
  CHECK(Decide(bf, {2, 1, 2, 2}) == Choice::kSecondEdge);
  const auto er = RuleSpec::ErAlwaysSecond();
  CHECK(Decide(er, {1, 1, 1, 1}) == Choice::kSecondEdge);
  CHECK(bf.Cap(1) == 1);
  CHECK(bf.Cap(2) == 2);
  CHECK(bf.Cap(1000) == 2);
}

TEST_CASE("rule json round trip and validation") {
  const auto custom = RuleSpec::Custom(2, {{1, 1, 3, 3}, {2, 2, 1, 1}});
  const auto back = RuleSpec::FromJson(custom.ToJson());
  CHECK(back.cutoff == 2);
  CHECK(back.table == custom.table);
  CHECK(RuleSpec::FromJson({{"mode", "bf"}}).mode == RuleMode::kBohmanFrieze);
  CHECK(RuleSpec::FromJson({{"mode", "er"}}).mode == RuleMode::kErAlwaysSecond);
  CHECK_THROWS_AS(RuleSpec::FromJson({{"mode", "nope"}}), Error);
  CHECK_THROWS_AS(RuleSpec::Custom(1, {{1, 1, 3, 1}}), Error);
}

TEST_CASE("custom table equal to Bohman-Frieze reproduces the fast path") {
  auto custom = RuleSpec::BohmanFrieze();
  custom.mode = RuleMode::kCustom;
  ProcessState fast(500, RuleSpec::BohmanFrieze(), 77);
  ProcessState slow(500, custom, 77);
  for (int i = 0; i < 2000; ++i) {
    const auto a = fast.Step();
    const auto b = slow.Step();
    REQUIRE(a.chosen == b.chosen);
  }
  CHECK(fast.Census().tree_counts == slow.Census().tree_counts);
}

TEST_CASE("run_until") {
  ProcessState p(10000, RuleSpec::BohmanFrieze(), 5);
  p.RunUntil(0);
  CHECK(p.steps() == 0);
  p.RunUntil(10000);
  CHECK(p.steps() == 10000);
  CHECK(SumOfSizes(p.Census()) == 10000);
  CHECK_THROWS_AS(p.RunUntil(10), Error);
}

TEST_CASE("census examples") {
  ProcessState fresh(5, RuleSpec::BohmanFrieze(), 1);
  auto c = fresh.Census();
  CHECK(c.tree_counts == std::map<std::uint64_t, std::uint64_t>{{1, 5}});
  CHECK(c.L1() == 1);

  ProcessState dup(5, RuleSpec::BohmanFrieze(), 1);
  dup.AddEdge(VertexPair::Of(1, 2));
  dup.AddEdge(VertexPair::Of(1, 2));
  c = dup.Census();
  CHECK(c.nontree_counts == std::map<std::uint64_t, std::uint64_t>{{2, 1}});
  CHECK(c.Trees(2) == 0);

  ProcessState path(5, RuleSpec::BohmanFrieze(), 1);
  path.AddEdge(VertexPair::Of(1, 2));
  path.AddEdge(VertexPair::Of(2, 3));
  c = path.Census();
  CHECK(c.Trees(3) == 1);
  CHECK(c.L1() == 3);
  CHECK(c.L2() == 1);
  CHECK(c.isolated == 2);
  CHECK(c.ComponentsInRange(2, 5) == 1);

  const auto j = c.ToJson(1, RuleSpec::BohmanFrieze());
  CHECK(j["I"] == 2);
  CHECK(j["tree_counts"]["3"] == 1);
  CHECK(j["L"][0] == 3);
}

TEST_CASE("identical seeds give identical event sequences") {
  ProcessState a(1000, RuleSpec::BohmanFrieze(), 2024);
  ProcessState b(1000, RuleSpec::BohmanFrieze(), 2024);
  ProcessState c(1000, RuleSpec::BohmanFrieze(), 2025);
  bool differs = false;
  for (int i = 0; i < 1500; ++i) {
    const auto ea = a.Step();
    const auto eb = b.Step();
    const auto ec = c.Step();
    REQUIRE(ea.first_candidate == eb.first_candidate);
    REQUIRE(ea.second_candidate == eb.second_candidate);
    REQUIRE(ea.chosen == eb.chosen);
    differs = differs || !(ea.chosen == ec.chosen);
  }
  CHECK(differs);
}

TEST_CASE("invariants hold along random trajectories") {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const std::uint64_t n = 40 + 37 * seed;
    const RuleSpec rule = seed % 3 == 0   ? RuleSpec::ErAlwaysSecond()
                          : seed % 3 == 1 ? RuleSpec::BohmanFrieze()
                                          : RuleSpec::Custom(2, {{1, 1, 1, 1},
                                                                 {2, 1, 3, 3},
                                                                 {1, 2, 2, 2}});
    ProcessState p(n, rule, seed);
    std::uint64_t prev_isolated = p.isolated();
    std::uint64_t prev_l1 = p.largest();
    for (std::uint64_t step = 0; step < 2 * n; ++step) {
      const auto ev = p.Step();
      REQUIRE((ev.chosen == ev.first_candidate || ev.chosen == ev.second_candidate));
      REQUIRE(ev.chosen.a < ev.chosen.b);
      REQUIRE(p.isolated() <= prev_isolated);
      REQUIRE(prev_isolated - p.isolated() <= 2);
      REQUIRE(p.largest() >= prev_l1);
      prev_isolated = p.isolated();
      prev_l1 = p.largest();
      if (step % 17 != 0) continue;
      const auto c = p.Census();
      REQUIRE(SumOfSizes(c) == n);
      REQUIRE(c.Trees(1) == p.isolated());
      REQUIRE(c.L1() == p.largest());
      REQUIRE(c.m == step + 1);
      std::uint64_t edges = 0;
      std::uint64_t sq = 0;
      for (Vertex v = 0; v < n; ++v) {
        if (!p.IsRoot(v)) continue;
        const auto s = p.RootSize(v);
        REQUIRE(p.RootEdges(v) + 1 >= s);
        REQUIRE((p.RootEdges(v) == 0) == (s == 1));
        edges += p.RootEdges(v);
        sq += s * s;
      }
      REQUIRE(edges == p.steps());
      REQUIRE(sq == p.sum_sq_sizes());
    }
  }
}

TEST_CASE("er_always_second isolated fraction matches the uniform multigraph") {
  // Each uniform edge misses a fixed vertex with probability 1 - 2/n, so
  // E I_m = n (1 - 2/n)^m exactly.
  const std::uint64_t n = 100000;
  const std::uint64_t m = n / 2;
  const int replicas = 20;
  std::vector<double> frac;
  for (int r = 0; r < replicas; ++r) {
    ProcessState p(n, RuleSpec::ErAlwaysSecond(), Rng::DeriveSeed(11, r));
    p.RunUntil(m);
    frac.push_back(static_cast<double>(p.isolated()) / n);
  }
  const double mean = std::accumulate(frac.begin(), frac.end(), 0.0) / replicas;
  double var = 0.0;
  for (double f : frac) var += (f - mean) * (f - mean);
  var /= replicas - 1;
  const double expected = std::pow(1.0 - 2.0 / n, static_cast<double>(m));
  CHECK(std::abs(expected - std::exp(-1.0)) < 1e-4);
  CHECK(std::abs(mean - expected) <= 3.0 * std::sqrt(var / replicas));
}

TEST_CASE("proposed edge frequencies follow the two-draw mechanism") {
  // Exact per-pair probabilities on a fixed graph: N = C(n,2), J = number of
  // isolated-isolated pairs. Such a pair is chosen w.p. (1 + (1 - J/N)) / N,
  // any other pair w.p. (1 - J/N) / N.
  const std::uint64_t n = 30;
  ProcessState p(n, RuleSpec::BohmanFrieze(), 8);
  p.AddEdge(VertexPair::Of(0, 1));
  p.AddEdge(VertexPair::Of(1, 2));
  p.AddEdge(VertexPair::Of(5, 9));
  const double pairs = n * (n - 1) / 2.0;
  const double iso = static_cast<double>(p.isolated());
  const double j = iso * (iso - 1) / 2.0;
  const double p_iso = (1.0 + (1.0 - j / pairs)) / pairs;
  const double p_other = (1.0 - j / pairs) / pairs;
  CHECK(std::abs(j * p_iso + (pairs - j) * p_other - 1.0) < 1e-12);

  const int trials = 1'000'000;
  std::uint64_t hits_iso = 0;
  for (int i = 0; i < trials; ++i) {
    const auto e = p.Propose();
    hits_iso += p.IsIsolated(e.a) && p.IsIsolated(e.b);
  }
  const double expected = j * p_iso;
  const double se = std::sqrt(expected * (1 - expected) / trials);
  CHECK(std::abs(static_cast<double>(hits_iso) / trials - expected) <= 3 * se);
  CHECK(p.steps() == 3);
}
