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

#include "bfsim/trees.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <queue>

#include "bfsim/error.hpp"

namespace bfsim {

namespace {

int FindRoot(std::vector<int>& parent, int v) {
  while (parent[v] != v) v = parent[v] = parent[parent[v]];
  return v;
}

std::vector<std::vector<int>> Adjacency(int k, const std::vector<Edge>& edges) {
  std::vector<std::vector<int>> adj(k);
  for (const auto& e : edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  return adj;
}

std::string Encode(const std::vector<std::vector<int>>& adj, int v, int parent) {
  std::vector<std::string> children;
  for (int w : adj[v]) {
    if (w != parent) children.push_back(Encode(adj, w, v));
  }
  std::sort(children.begin(), children.end());
  std::string out = "(";
  for (const auto& c : children) out += c;
  out += ")";
  return out;
}

}  // namespace

LabeledForest::LabeledForest(int k, std::vector<Edge> edges)
    : k_(k), edges_(std::move(edges)) {
  Require(k >= 1, ErrorCode::kInvalidArgument, "forest needs a vertex");
  std::vector<int> parent(k);
  std::iota(parent.begin(), parent.end(), 0);
  for (const auto& e : edges_) {
    Require(e.u >= 0 && e.v >= 0 && e.u < k && e.v < k && e.u != e.v,
            ErrorCode::kInvalidArgument, "forest edge out of range");
    const int ru = FindRoot(parent, e.u);
    const int rv = FindRoot(parent, e.v);
    Require(ru != rv, ErrorCode::kInvalidArgument, "forest contains a cycle");
    parent[ru] = rv;
  }
}

LabeledForest LabeledForest::DisjointUnion(const LabeledForest& a,
                                           const LabeledForest& b) {
  std::vector<Edge> edges = a.edges();
  for (const auto& e : b.edges()) edges.push_back({e.u + a.k(), e.v + a.k()});
  return LabeledForest(a.k() + b.k(), std::move(edges));
}

LabeledTree::LabeledTree(int k, std::vector<Edge> edges)
    : forest_(k, std::move(edges)) {
  Require(forest_.connected(), ErrorCode::kInvalidArgument,
          "tree must have exactly k - 1 edges");
}

LabeledTree DecodePrufer(int k, std::span<const int> sequence) {
  Require(k >= 1, ErrorCode::kInvalidArgument, "tree size must be positive");
  if (k == 1) return LabeledTree(1, {});
  Require(static_cast<int>(sequence.size()) == k - 2,
          ErrorCode::kInvalidArgument, "Pruefer sequence must have length k-2");
  std::vector<int> degree(k, 1);
  for (int x : sequence) {
    Require(x >= 0 && x < k, ErrorCode::kInvalidArgument,
            "Pruefer entry out of range");
    ++degree[x];
  }
  std::priority_queue<int, std::vector<int>, std::greater<int>> leaves;
  for (int v = 0; v < k; ++v) {
    if (degree[v] == 1) leaves.push(v);
  }
  std::vector<Edge> edges;
  edges.reserve(k - 1);
  for (int x : sequence) {
    const int leaf = leaves.top();
    leaves.pop();
    edges.push_back({std::min(leaf, x), std::max(leaf, x)});
    if (--degree[x] == 1) leaves.push(x);
  }
  const int a = leaves.top();
  leaves.pop();
  const int b = leaves.top();
  edges.push_back({a, b});
  return LabeledTree(k, std::move(edges));
}

void ForEachLabeledTree(int k, const std::function<void(const LabeledTree&)>& fn,
                        int k_max) {
  Require(k >= 1 && k <= k_max, ErrorCode::kInvalidArgument,
          "tree size " + std::to_string(k) + " outside [1, " +
              std::to_string(k_max) + "]");
  if (k <= 2) {
    fn(k == 1 ? LabeledTree(1, {}) : LabeledTree(2, {{0, 1}}));
    return;
  }
  std::vector<int> seq(k - 2, 0);
  while (true) {
    fn(DecodePrufer(k, seq));
    int pos = k - 3;
    while (pos >= 0 && ++seq[pos] == k) seq[pos--] = 0;
    if (pos < 0) break;
  }
}

std::vector<LabeledTree> EnumerateLabeledTrees(int k, int k_max) {
  std::vector<LabeledTree> out;
  ForEachLabeledTree(k, [&](const LabeledTree& t) { out.push_back(t); }, k_max);
  return out;
}

std::string CanonicalForm(const LabeledTree& tree) {
  const int k = tree.k();
  if (k == 1) return "()";
  const auto adj = Adjacency(k, tree.edges());
  // Peel leaves until one or two centers remain.
  std::vector<int> degree(k);
  std::vector<int> layer;
  for (int v = 0; v < k; ++v) {
    degree[v] = static_cast<int>(adj[v].size());
    if (degree[v] <= 1) layer.push_back(v);
  }
  int remaining = k;
  while (remaining > 2) {
    remaining -= static_cast<int>(layer.size());
    std::vector<int> next;
    for (int v : layer) {
      for (int w : adj[v]) {
        if (--degree[w] == 1) next.push_back(w);
      }
    }
    layer = std::move(next);
  }
  std::string best = Encode(adj, layer[0], -1);
  if (layer.size() == 2) best = std::min(best, Encode(adj, layer[1], -1));
  return best;
}

const std::vector<TreeClass>& TreeClasses(int k, int k_max) {
  Require(k >= 1 && k <= k_max, ErrorCode::kInvalidArgument,
          "tree size " + std::to_string(k) + " outside [1, " +
              std::to_string(k_max) + "]");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<std::vector<TreeClass>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[k];
  if (!slot) {
    std::map<std::string, std::size_t> index;
    auto classes = std::make_unique<std::vector<TreeClass>>();
    ForEachLabeledTree(
        k,
        [&](const LabeledTree& t) {
          std::string canon = CanonicalForm(t);
          auto it = index.find(canon);
          if (it == index.end()) {
            index.emplace(canon, classes->size());
            classes->push_back({std::move(canon), t, 1});
          } else {
            ++(*classes)[it->second].count;
          }
        },
        k_max);
    std::sort(classes->begin(), classes->end(),
              [](const TreeClass& a, const TreeClass& b) {
                return a.canonical < b.canonical;
              });
    slot = std::move(classes);
  }
  return *slot;
}

}  // namespace bfsim
