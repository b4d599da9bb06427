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

#ifndef BFSIM_PROCESS_HPP_
#define BFSIM_PROCESS_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "bfsim/rng.hpp"
#include "json.hpp"

namespace bfsim {

using Vertex = std::uint32_t;

enum class Choice : std::uint8_t { kFirstEdge, kSecondEdge };

enum class RuleMode { kBohmanFrieze, kErAlwaysSecond, kCustom };

// A bounded-size rule: the choice between the two offered edges depends only
// on the sizes of the four endpoint components, with every size above
// `cutoff` collapsed into the single class cutoff + 1.
struct RuleSpec {
  RuleMode mode = RuleMode::kBohmanFrieze;
  int cutoff = 1;
  // Indexed by TableIndex(); always (cutoff + 1)^4 entries.
  std::vector<Choice> table;

  static RuleSpec BohmanFrieze();
  static RuleSpec ErAlwaysSecond();
  // `first_edge` lists the capped size tuples (entries in 1..cutoff+1) for
  // which the first candidate is taken; every other tuple takes the second.
  static RuleSpec Custom(int cutoff,
                         const std::vector<std::array<int, 4>>& first_edge);

  // {"mode": "bf"|"er"|"custom", "cutoff": c, "first_edge": [[..4..], ...]}
  static RuleSpec FromJson(const nlohmann::json& j);
  nlohmann::json ToJson() const;

  std::uint32_t Cap(std::uint64_t size) const {
    const auto top = static_cast<std::uint64_t>(cutoff) + 1;
    return static_cast<std::uint32_t>(size < top ? size : top);
  }
  std::size_t TableIndex(const std::array<std::uint32_t, 4>& capped) const;
};

// Pure table lookup; `capped` must already be capped at cutoff + 1.
Choice Decide(const RuleSpec& rule, const std::array<std::uint32_t, 4>& capped);

// Unordered pair of distinct vertices, stored with a < b.
struct VertexPair {
  Vertex a = 0;
  Vertex b = 0;

  static VertexPair Of(Vertex u, Vertex v) {
    return u < v ? VertexPair{u, v} : VertexPair{v, u};
  }
  friend bool operator==(const VertexPair&, const VertexPair&) = default;
};

struct EdgeEvent {
  std::uint64_t step = 0;  // index m of the step that produced this edge
  VertexPair first_candidate;
  VertexPair second_candidate;
  VertexPair chosen;
  bool was_first_isolated_pair = false;
};

struct ComponentCensus {
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  std::uint64_t isolated = 0;
  // size -> number of components with edge count == size - 1
  std::map<std::uint64_t, std::uint64_t> tree_counts;
  // size -> number of components with edge count >= size
  std::map<std::uint64_t, std::uint64_t> nontree_counts;
  // Largest component sizes, descending. Always holds at least two entries
  // when n >= 2.
  std::vector<std::uint64_t> largest;

  std::uint64_t L1() const { return largest.empty() ? 0 : largest[0]; }
  std::uint64_t L2() const { return largest.size() < 2 ? 0 : largest[1]; }
  std::uint64_t Trees(std::uint64_t k) const;
  std::uint64_t NonTrees(std::uint64_t k) const;
  // Number of components of any kind with size in [lo, hi].
  std::uint64_t ComponentsInRange(std::uint64_t lo, std::uint64_t hi) const;

  nlohmann::json ToJson(std::uint64_t seed, const RuleSpec& rule) const;
};

// Exact discrete process on n vertices. Union by size with path halving;
// isolated count, per-component edge multiplicity, the largest size and the
// sum of squared sizes are maintained incrementally.
class ProcessState {
 public:
  ProcessState(std::uint64_t n, RuleSpec rule, std::uint64_t seed);

  EdgeEvent Step();
  void RunUntil(std::uint64_t m_target);

  // Runs to m_target, invoking observer(state) after every step.
  template <class Observer>
  void RunUntil(std::uint64_t m_target, Observer&& observer);

  // Applies the rule to the given candidates and adds the chosen edge.
  EdgeEvent Apply(VertexPair first, VertexPair second);
  // Draws two candidates and returns the edge the rule would pick, without
  // modifying the graph.
  VertexPair Propose();
  // Adds an edge directly, bypassing the rule. Counts as one step.
  void AddEdge(VertexPair e);

  ComponentCensus Census(std::size_t num_largest = 8) const;

  std::uint64_t n() const { return n_; }
  std::uint64_t steps() const { return m_; }
  std::uint64_t isolated() const { return isolated_; }
  std::uint64_t largest() const { return largest_; }
  std::uint64_t seed() const { return seed_; }
  const RuleSpec& rule() const { return rule_; }
  // Sum over components of size^2.
  std::uint64_t sum_sq_sizes() const { return sum_sq_; }

  Vertex Find(Vertex v);
  Vertex FindRoot(Vertex v) const;
  bool IsRoot(Vertex v) const { return parent_[v] == v; }
  bool IsIsolated(Vertex v) const { return parent_[v] == v && size_[v] == 1; }
  std::uint64_t RootSize(Vertex root) const { return size_[root]; }
  std::uint64_t RootEdges(Vertex root) const { return edges_[root]; }

 private:
  void CheckTarget(std::uint64_t m_target) const;
  void Advance();
  VertexPair DrawPair();
  Choice Choose(VertexPair first, VertexPair second);
  void Merge(VertexPair e);

  std::uint64_t n_;
  std::uint64_t m_ = 0;
  std::uint64_t isolated_;
  std::uint64_t largest_ = 1;
  std::uint64_t sum_sq_;
  std::uint64_t seed_;
  RuleSpec rule_;
  Rng rng_;
  std::vector<Vertex> parent_;
  std::vector<std::uint32_t> size_;
  std::vector<std::uint64_t> edges_;
};

template <class Observer>
void ProcessState::RunUntil(std::uint64_t m_target, Observer&& observer) {
  CheckTarget(m_target);
  while (m_ < m_target) {
    Advance();
    observer(static_cast<const ProcessState&>(*this));
  }
}

}  // namespace bfsim

#endif  // BFSIM_PROCESS_HPP_
