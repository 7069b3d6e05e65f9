// Copyright 2026 The attndep Authors.
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

#ifndef ATTNDEP_EXTRACTION_HPP_
#define ATTNDEP_EXTRACTION_HPP_

#include <cstddef>
#include <set>
#include <utility>
#include <vector>

#include "attndep/common.hpp"

namespace attndep {

struct Arc {
  std::size_t from = 0;
  std::size_t to = 0;
  friend auto operator<=>(const Arc&, const Arc&) = default;
};

// Unordered unit pair, stored with first < second.
using UndirectedPair = std::pair<std::size_t, std::size_t>;

inline UndirectedPair undirected(std::size_t a, std::size_t b) {
  return a < b ? UndirectedPair{a, b} : UndirectedPair{b, a};
}

// One arc per row of the attention matrix (Max method).
struct ArcSet {
  std::vector<Arc> arcs;

  std::set<UndirectedPair> undirected_view() const;
};

// Rooted arborescence over units. parent[root] == kNoParent.
struct DepTree {
  static constexpr std::size_t kNoParent = static_cast<std::size_t>(-1);

  std::vector<std::size_t> parent;
  std::size_t root = 0;

  std::size_t size() const { return parent.size(); }
  std::vector<Arc> edges() const;  // (parent -> child)
  std::set<UndirectedPair> undirected_view() const;
  double total_weight(const SquareMatrix& weights) const;

  // U-1 edges, single root, every node reaches the root.
  bool is_valid() const;

  friend bool operator==(const DepTree&, const DepTree&) = default;
};

// Row-wise argmax excluding the diagonal; ties go to the smaller column.
// Throws DomainError for fewer than two units.
ArcSet extract_max_arcs(const SquareMatrix& attention);

// Maximum spanning arborescence rooted at `root`, where weights(i, j) is the
// weight of edge i -> j (i becomes the parent of j). Edges into the root and
// self-loops are ignored. Entries equal to -infinity mark absent edges.
// Throws DomainError for an empty matrix or an out-of-range root.
DepTree chu_liu_edmonds(const SquareMatrix& weights, std::size_t root);

inline constexpr std::size_t kBruteForceLimit = 8;

// Exhaustive oracle for chu_liu_edmonds. Among maximal trees returns the
// lexicographically smallest parent vector. Refuses more than 8 nodes.
DepTree brute_force_arborescence(const SquareMatrix& weights, std::size_t root);

// MST method: chu_liu_edmonds on the attention with the diagonal removed,
// rooted at the unit holding the gold root.
DepTree extract_mst_tree(const SquareMatrix& attention, std::size_t gold_root);

}  // namespace attndep

#endif  // ATTNDEP_EXTRACTION_HPP_
