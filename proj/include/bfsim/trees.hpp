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

#ifndef BFSIM_TREES_HPP_
#define BFSIM_TREES_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace bfsim {

struct Edge {
  int u = 0;
  int v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

// Acyclic graph on vertices {0, ..., k-1}; vertices without edges are
// isolated components of the forest.
class LabeledForest {
 public:
  LabeledForest(int k, std::vector<Edge> edges);

  int k() const { return k_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t num_edges() const { return edges_.size(); }
  bool connected() const { return static_cast<int>(edges_.size()) + 1 == k_; }

  // Vertex-disjoint union; the second forest's labels are shifted by a.k().
  static LabeledForest DisjointUnion(const LabeledForest& a,
                                     const LabeledForest& b);

 private:
  int k_;
  std::vector<Edge> edges_;
};

// A spanning tree on {0, ..., k-1}: connected, acyclic, k - 1 edges.
class LabeledTree {
 public:
  LabeledTree(int k, std::vector<Edge> edges);

  int k() const { return forest_.k(); }
  const std::vector<Edge>& edges() const { return forest_.edges(); }
  const LabeledForest& forest() const { return forest_; }
  operator const LabeledForest&() const { return forest_; }

 private:
  LabeledForest forest_;
};

inline constexpr int kDefaultMaxTreeSize = 8;

// Decodes a Pruefer sequence of length k - 2 with entries in [0, k).
LabeledTree DecodePrufer(int k, std::span<const int> sequence);

// Visits all k^{k-2} labeled trees on k vertices, one per Pruefer sequence,
// in lexicographic sequence order.
void ForEachLabeledTree(int k, const std::function<void(const LabeledTree&)>& fn,
                        int k_max = kDefaultMaxTreeSize);
std::vector<LabeledTree> EnumerateLabeledTrees(int k,
                                               int k_max = kDefaultMaxTreeSize);

// AHU encoding of the tree rooted at its center (the smaller encoding when
// there are two centers). Equal strings iff isomorphic.
std::string CanonicalForm(const LabeledTree& tree);

struct TreeClass {
  std::string canonical;
  LabeledTree representative;
  std::uint64_t count = 0;  // labeled trees in the class
};

// Isomorphism classes of labeled trees on k vertices, ordered by canonical
// form. Computed once per k and cached for the life of the process.
const std::vector<TreeClass>& TreeClasses(int k,
                                          int k_max = kDefaultMaxTreeSize);

}  // namespace bfsim

#endif  // BFSIM_TREES_HPP_
