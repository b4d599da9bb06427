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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "bfsim/error.hpp"
#include "bfsim/trees.hpp"
#include "doctest.h"

using namespace bfsim;

namespace {

using EdgeSet = std::set<std::pair<int, int>>;

EdgeSet AsSet(const LabeledTree& t) {
  EdgeSet s;
  for (const auto& e : t.edges()) s.insert({std::min(e.u, e.v), std::max(e.u, e.v)});
  return s;
}

bool Acyclic(int k, const std::vector<std::pair<int, int>>& edges) {
  std::vector<int> parent(k);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[v] != v) v = parent[v];
    return v;
  };
  for (auto [u, v] : edges) {
    const int ru = find(u);
    const int rv = find(v);
    if (ru == rv) return false;
    parent[ru] = rv;
  }
  return true;
}

}  // namespace

TEST_CASE("Cayley counts") {
  for (int k = 1; k <= 8; ++k) {
    std::uint64_t count = 0;
    ForEachLabeledTree(k, [&](const LabeledTree& t) {
      ++count;
      REQUIRE(static_cast<int>(t.edges().size()) == k - 1);
    });
    const auto expected =
        k <= 2 ? 1ULL : static_cast<std::uint64_t>(std::pow(k, k - 2) + 0.5);
    CHECK(count == expected);
  }
  CHECK(EnumerateLabeledTrees(1)[0].edges().empty());
  CHECK(EnumerateLabeledTrees(2)[0].edges() == std::vector<Edge>{{0, 1}});
  CHECK_THROWS_AS(EnumerateLabeledTrees(0), Error);
  CHECK_THROWS_AS(EnumerateLabeledTrees(9), Error);
  CHECK(EnumerateLabeledTrees(3, 3).size() == 3);
  CHECK_THROWS_AS(EnumerateLabeledTrees(4, 3), Error);
}

TEST_CASE("k=3 gives the three paths") {
  std::set<int> centers;
  for (const auto& t : EnumerateLabeledTrees(3)) {
    std::vector<int> deg(3, 0);
    for (const auto& e : t.edges()) ++deg[e.u], ++deg[e.v];
    centers.insert(static_cast<int>(std::max_element(deg.begin(), deg.end()) -
                                    deg.begin()));
  }
  CHECK(centers == std::set<int>{0, 1, 2});
}

TEST_CASE("k=5 Pruefer trees coincide with brute-force spanning trees") {
  // All 4-edge subsets of K5 that are acyclic.
  std::vector<std::pair<int, int>> all;
  for (int u = 0; u < 5; ++u)
    for (int v = u + 1; v < 5; ++v) all.push_back({u, v});
  std::set<EdgeSet> brute;
  for (int mask = 0; mask < (1 << all.size()); ++mask) {
    if (__builtin_popcount(mask) != 4) continue;
    std::vector<std::pair<int, int>> chosen;
    for (std::size_t i = 0; i < all.size(); ++i)
      if (mask >> i & 1) chosen.push_back(all[i]);
    if (Acyclic(5, chosen)) brute.insert(EdgeSet(chosen.begin(), chosen.end()));
  }
  std::set<EdgeSet> prufer;
  for (const auto& t : EnumerateLabeledTrees(5)) prufer.insert(AsSet(t));
  CHECK(brute.size() == 125);
  CHECK(prufer == brute);
}

TEST_CASE("isomorphism classes") {
  // Number of unlabeled trees on k vertices.
  const int unlabeled[] = {0, 1, 1, 1, 2, 3, 6, 11, 23};
  for (int k = 1; k <= 8; ++k) {
    const auto& classes = TreeClasses(k);
    CHECK(static_cast<int>(classes.size()) == unlabeled[k]);
    std::uint64_t total = 0;
    for (const auto& c : classes) {
      total += c.count;
      CHECK(CanonicalForm(c.representative) == c.canonical);
    }
    CHECK(total == (k <= 2 ? 1ULL
                           : static_cast<std::uint64_t>(std::pow(k, k - 2) + 0.5)));
  }
  // Star K_{1,4} on 5 vertices: 5 labelings.
  const auto& five = TreeClasses(5);
  std::vector<std::uint64_t> counts;
  for (const auto& c : five) counts.push_back(c.count);
  std::sort(counts.begin(), counts.end());
  CHECK(counts == std::vector<std::uint64_t>{5, 60, 60});
}

TEST_CASE("canonical form is invariant under relabeling") {
  std::mt19937 gen(7);
  const auto trees = EnumerateLabeledTrees(7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto& t = trees[gen() % trees.size()];
    std::vector<int> perm(7);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    std::vector<Edge> relabeled;
    for (const auto& e : t.edges()) relabeled.push_back({perm[e.u], perm[e.v]});
    CHECK(CanonicalForm(LabeledTree(7, relabeled)) == CanonicalForm(t));
  }
  const LabeledTree path(4, {{0, 1}, {1, 2}, {2, 3}});
  const LabeledTree star(4, {{0, 1}, {0, 2}, {0, 3}});
  CHECK(CanonicalForm(path) != CanonicalForm(star));
}

TEST_CASE("forest validation") {
  CHECK_THROWS_AS(LabeledForest(3, {{0, 1}, {1, 2}, {0, 2}}), Error);
  CHECK_THROWS_AS(LabeledForest(3, {{0, 3}}), Error);
  CHECK_THROWS_AS(LabeledTree(4, {{0, 1}, {2, 3}}), Error);
  const LabeledForest f(4, {{0, 1}, {2, 3}});
  CHECK_FALSE(f.connected());
  const auto u = LabeledForest::DisjointUnion(f, LabeledForest(2, {{0, 1}}));
  CHECK(u.k() == 6);
  CHECK(u.edges().back() == Edge{4, 5});
}
