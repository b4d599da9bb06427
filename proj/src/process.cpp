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

#include "bfsim/process.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <string>

#include "bfsim/error.hpp"

namespace bfsim {

namespace {

std::size_t TableSize(int cutoff) {
  const std::size_t c = static_cast<std::size_t>(cutoff) + 1;
  return c * c * c * c;
}

const char* ModeName(RuleMode mode) {
  switch (mode) {
    case RuleMode::kBohmanFrieze:
      return "bohman_frieze";
    case RuleMode::kErAlwaysSecond:
      return "er_always_second";
    case RuleMode::kCustom:
      return "custom";
  }
  return "custom";
}

}  // namespace

RuleSpec RuleSpec::BohmanFrieze() {
  RuleSpec r = Custom(1, {{1, 1, 1, 1}, {1, 1, 1, 2}, {1, 1, 2, 1}, {1, 1, 2, 2}});
  r.mode = RuleMode::kBohmanFrieze;
  return r;
}

RuleSpec RuleSpec::ErAlwaysSecond() {
  RuleSpec r;
  r.mode = RuleMode::kErAlwaysSecond;
  r.cutoff = 0;
  r.table.assign(TableSize(0), Choice::kSecondEdge);
  return r;
}

RuleSpec RuleSpec::Custom(int cutoff,
                          const std::vector<std::array<int, 4>>& first_edge) {
  Require(cutoff >= 0 && cutoff <= 64, ErrorCode::kInvalidArgument,
          "rule cutoff must lie in [0, 64]");
  RuleSpec r;
  r.mode = RuleMode::kCustom;
  r.cutoff = cutoff;
  r.table.assign(TableSize(cutoff), Choice::kSecondEdge);
  for (const auto& tuple : first_edge) {
    std::array<std::uint32_t, 4> capped{};
    for (int i = 0; i < 4; ++i) {
      Require(tuple[i] >= 1 && tuple[i] <= cutoff + 1,
              ErrorCode::kInvalidArgument,
              "rule size tuple entries must lie in [1, cutoff + 1]");
      capped[i] = static_cast<std::uint32_t>(tuple[i]);
    }
    r.table[r.TableIndex(capped)] = Choice::kFirstEdge;
  }
  return r;
}

RuleSpec RuleSpec::FromJson(const nlohmann::json& j) {
  try {
    const std::string mode = j.value("mode", std::string("custom"));
    if (mode == "bf" || mode == "bohman_frieze") return BohmanFrieze();
    if (mode == "er" || mode == "er_always_second") return ErAlwaysSecond();
    Require(mode == "custom", ErrorCode::kInvalidInput,
            "unknown rule mode '" + mode + "'");
    std::vector<std::array<int, 4>> first;
    for (const auto& t : j.at("first_edge")) {
      first.push_back(t.get<std::array<int, 4>>());
    }
    return Custom(j.at("cutoff").get<int>(), first);
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kInvalidInput, std::string("malformed rule: ") + e.what());
  }
}

nlohmann::json RuleSpec::ToJson() const {
  nlohmann::json j;
  j["mode"] = ModeName(mode);
  j["cutoff"] = cutoff;
  if (mode == RuleMode::kCustom) {
    nlohmann::json first = nlohmann::json::array();
    const std::uint32_t c = static_cast<std::uint32_t>(cutoff) + 1;
    for (std::size_t idx = 0; idx < table.size(); ++idx) {
      if (table[idx] != Choice::kFirstEdge) continue;
      std::size_t rest = idx;
      std::array<int, 4> tuple{};
      for (int i = 0; i < 4; ++i) {
        tuple[i] = static_cast<int>(rest % c) + 1;
        rest /= c;
      }
      first.push_back(tuple);
    }
    j["first_edge"] = first;
  }
  return j;
}

std::size_t RuleSpec::TableIndex(
    const std::array<std::uint32_t, 4>& capped) const {
  const std::size_t c = static_cast<std::size_t>(cutoff) + 1;
  std::size_t idx = 0;
  for (int i = 3; i >= 0; --i) idx = idx * c + (capped[i] - 1);
  return idx;
}

Choice Decide(const RuleSpec& rule, const std::array<std::uint32_t, 4>& capped) {
  return rule.table[rule.TableIndex(capped)];
}

std::uint64_t ComponentCensus::Trees(std::uint64_t k) const {
  auto it = tree_counts.find(k);
  return it == tree_counts.end() ? 0 : it->second;
}

std::uint64_t ComponentCensus::NonTrees(std::uint64_t k) const {
  auto it = nontree_counts.find(k);
  return it == nontree_counts.end() ? 0 : it->second;
}

std::uint64_t ComponentCensus::ComponentsInRange(std::uint64_t lo,
                                                 std::uint64_t hi) const {
  std::uint64_t total = 0;
  for (auto it = tree_counts.lower_bound(lo);
       it != tree_counts.end() && it->first <= hi; ++it) {
    total += it->second;
  }
  for (auto it = nontree_counts.lower_bound(lo);
       it != nontree_counts.end() && it->first <= hi; ++it) {
    total += it->second;
  }
  return total;
}

nlohmann::json ComponentCensus::ToJson(std::uint64_t seed,
                                       const RuleSpec& rule) const {
  auto histogram = [](const std::map<std::uint64_t, std::uint64_t>& h) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [size, count] : h) j[std::to_string(size)] = count;
    return j;
  };
  return {{"schema", "bfsim.census/1"},
          {"n", n},
          {"m", m},
          {"seed", seed},
          {"rule", rule.ToJson()},
          {"tree_counts", histogram(tree_counts)},
          {"nontree_counts", histogram(nontree_counts)},
          {"L", largest},
          {"I", isolated}};
}

ProcessState::ProcessState(std::uint64_t n, RuleSpec rule, std::uint64_t seed)
    : n_(n),
      isolated_(n),
      sum_sq_(n),
      seed_(seed),
      rule_(std::move(rule)),
      rng_(seed) {
  Require(n >= 2, ErrorCode::kInvalidArgument,
          "process needs at least two vertices");
  Require(n <= (std::uint64_t{1} << 31), ErrorCode::kInvalidArgument,
          "process supports at most 2^31 vertices");
  Require(rule_.table.size() == TableSize(rule_.cutoff),
          ErrorCode::kInvalidArgument, "rule decision table is not total");
  parent_.resize(n);
  for (std::uint64_t v = 0; v < n; ++v) parent_[v] = static_cast<Vertex>(v);
  size_.assign(n, 1);
  edges_.assign(n, 0);
}

Vertex ProcessState::Find(Vertex v) {
  while (parent_[v] != v) {
    parent_[v] = parent_[parent_[v]];
    v = parent_[v];
  }
  return v;
}

Vertex ProcessState::FindRoot(Vertex v) const {
  while (parent_[v] != v) v = parent_[v];
  return v;
}

VertexPair ProcessState::DrawPair() {
  const auto u = static_cast<Vertex>(rng_.Below(n_));
  auto v = static_cast<Vertex>(rng_.Below(n_ - 1));
  if (v >= u) ++v;
  return VertexPair::Of(u, v);
}

Choice ProcessState::Choose(VertexPair first, VertexPair second) {
  switch (rule_.mode) {
    case RuleMode::kBohmanFrieze:
      return IsIsolated(first.a) && IsIsolated(first.b) ? Choice::kFirstEdge
                                                        : Choice::kSecondEdge;
    case RuleMode::kErAlwaysSecond:
      return Choice::kSecondEdge;
    case RuleMode::kCustom:
      break;
  }
  const std::array<std::uint32_t, 4> capped{
      rule_.Cap(size_[Find(first.a)]), rule_.Cap(size_[Find(first.b)]),
      rule_.Cap(size_[Find(second.a)]), rule_.Cap(size_[Find(second.b)])};
  return Decide(rule_, capped);
}

void ProcessState::Merge(VertexPair e) {
  ++m_;
  Vertex ra = Find(e.a);
  Vertex rb = Find(e.b);
  if (ra == rb) {
    ++edges_[ra];
    return;
  }
  const std::uint64_t sa = size_[ra];
  const std::uint64_t sb = size_[rb];
  isolated_ -= (sa == 1) + (sb == 1);
  if (sa < sb) std::swap(ra, rb);
  parent_[rb] = ra;
  size_[ra] = static_cast<std::uint32_t>(sa + sb);
  edges_[ra] += edges_[rb] + 1;
  edges_[rb] = 0;
  sum_sq_ += 2 * sa * sb;
  largest_ = std::max<std::uint64_t>(largest_, sa + sb);
}

void ProcessState::Advance() {
  const VertexPair first = DrawPair();
  const VertexPair second = DrawPair();
  Merge(Choose(first, second) == Choice::kFirstEdge ? first : second);
}

EdgeEvent ProcessState::Apply(VertexPair first, VertexPair second) {
  Require(first.a != first.b && second.a != second.b && first.b < n_ &&
              second.b < n_ && first.a < first.b && second.a < second.b,
          ErrorCode::kInvalidArgument, "candidate pairs must be valid");
  EdgeEvent ev;
  ev.step = m_ + 1;
  ev.first_candidate = first;
  ev.second_candidate = second;
  ev.was_first_isolated_pair = IsIsolated(first.a) && IsIsolated(first.b);
  ev.chosen = Choose(first, second) == Choice::kFirstEdge ? first : second;
  Merge(ev.chosen);
  return ev;
}

EdgeEvent ProcessState::Step() {
  const VertexPair first = DrawPair();
  const VertexPair second = DrawPair();
  return Apply(first, second);
}

VertexPair ProcessState::Propose() {
  const VertexPair first = DrawPair();
  const VertexPair second = DrawPair();
  return Choose(first, second) == Choice::kFirstEdge ? first : second;
}

void ProcessState::AddEdge(VertexPair e) {
  Require(e.a < e.b && e.b < n_, ErrorCode::kInvalidArgument,
          "edge must join two distinct vertices");
  Merge(e);
}

void ProcessState::CheckTarget(std::uint64_t m_target) const {
  Require(m_target >= m_, ErrorCode::kInvalidArgument,
          "run target " + std::to_string(m_target) +
              " is before the current step " + std::to_string(m_));
}

void ProcessState::RunUntil(std::uint64_t m_target) {
  CheckTarget(m_target);
  while (m_ < m_target) Advance();
}

ComponentCensus ProcessState::Census(std::size_t num_largest) const {
  ComponentCensus c;
  c.n = n_;
  c.m = m_;
  c.isolated = isolated_;
  num_largest = std::max<std::size_t>(num_largest, 2);
  std::vector<std::uint64_t> top;
  top.reserve(num_largest + 1);
  for (std::uint64_t v = 0; v < n_; ++v) {
    if (parent_[v] != v) continue;
    const std::uint64_t s = size_[v];
    if (edges_[v] + 1 == s) {
      ++c.tree_counts[s];
    } else {
      ++c.nontree_counts[s];
    }
    if (top.size() < num_largest || s > top.back()) {
      top.insert(std::upper_bound(top.begin(), top.end(), s,
                                  std::greater<std::uint64_t>()),
                 s);
      if (top.size() > num_largest) top.pop_back();
    }
  }
  while (top.size() < 2) top.push_back(0);
  c.largest = std::move(top);
  return c;
}

}  // namespace bfsim
