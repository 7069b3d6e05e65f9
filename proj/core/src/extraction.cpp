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

#include "attndep/extraction.hpp"

#include <cmath>
#include <limits>

namespace attndep {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kNone = DepTree::kNoParent;

// Recursive contraction. weights(i, j) is edge i -> j; -inf means absent.
// The diagonal and the root column are already -inf.
std::vector<std::size_t> contract_and_solve(const SquareMatrix& weights,
                                            std::size_t root) {
  const std::size_t n = weights.size();

  // Best incoming edge per node; strict '>' keeps the smallest source on ties.
  std::vector<std::size_t> best(n, kNone);
  for (std::size_t v = 0; v < n; ++v) {
    if (v == root) continue;
    double best_weight = kNegInf;
    for (std::size_t u = 0; u < n; ++u) {
      if (weights(u, v) > best_weight) {
        best_weight = weights(u, v);
        best[v] = u;
      }
    }
    if (best[v] == kNone) {
      throw DomainError("node " + std::to_string(v) +
                        " cannot be reached from the root");
    }
  }

  // Find one cycle among the chosen edges.
  std::vector<std::size_t> visit(n, kNone);
  std::vector<std::size_t> cycle;
  for (std::size_t start = 0; start < n && cycle.empty(); ++start) {
    std::size_t v = start;
    while (v != root && visit[v] == kNone) {
      visit[v] = start;
      v = best[v];
    }
    if (v != root && visit[v] == start) {
      std::size_t c = v;
      do {
        cycle.push_back(c);
        c = best[c];
      } while (c != v);
    }
  }
  if (cycle.empty()) return best;

  std::vector<bool> in_cycle(n, false);
  for (std::size_t c : cycle) in_cycle[c] = true;

  // Non-cycle nodes keep their relative order; the cycle becomes the last id.
  std::vector<std::size_t> new_id(n);
  std::vector<std::size_t> old_of;
  for (std::size_t v = 0; v < n; ++v) {
    if (!in_cycle[v]) {
      new_id[v] = old_of.size();
      old_of.push_back(v);
    }
  }
  const std::size_t super = old_of.size();
  for (std::size_t c : cycle) new_id[c] = super;
  const std::size_t m = super + 1;

  SquareMatrix contracted(m, kNegInf);
  std::vector<std::size_t> enter_at(m, kNone);  // source -> cycle node entered
  std::vector<std::size_t> leave_from(m, kNone);  // target -> cycle node left
  for (std::size_t u = 0; u < n; ++u) {
    if (in_cycle[u]) continue;
    const std::size_t nu = new_id[u];
    for (std::size_t v = 0; v < n; ++v) {
      if (u == v) continue;
      if (!in_cycle[v]) {
        contracted(nu, new_id[v]) = weights(u, v);
        continue;
      }
      if (weights(u, v) == kNegInf) continue;
      const double adjusted = weights(u, v) - weights(best[v], v);
      if (adjusted > contracted(nu, super)) {
        contracted(nu, super) = adjusted;
        enter_at[nu] = v;
      }
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (in_cycle[v]) continue;
    const std::size_t nv = new_id[v];
    for (std::size_t u : cycle) {
      if (weights(u, v) > contracted(super, nv)) {
        contracted(super, nv) = weights(u, v);
        leave_from[nv] = u;
      }
    }
  }
  for (std::size_t i = 0; i < m; ++i) contracted(i, i) = kNegInf;
  const std::size_t new_root = new_id[root];
  for (std::size_t i = 0; i < m; ++i) contracted(i, new_root) = kNegInf;

  const std::vector<std::size_t> sub = contract_and_solve(contracted, new_root);

  std::vector<std::size_t> parent(n, kNone);
  for (std::size_t v = 0; v < n; ++v) {
    if (in_cycle[v] || v == root) continue;
    const std::size_t p = sub[new_id[v]];
    parent[v] = p == super ? leave_from[new_id[v]] : old_of[p];
  }
  for (std::size_t c : cycle) parent[c] = best[c];
  const std::size_t entering_source = sub[super];
  parent[enter_at[entering_source]] = old_of[entering_source];
  return parent;
}

double edge_weight_sum(const SquareMatrix& weights,
                       const std::vector<std::size_t>& parent) {
  double total = 0.0;
  for (std::size_t v = 0; v < parent.size(); ++v) {
    if (parent[v] != kNone) total += weights(parent[v], v);
  }
  return total;
}

bool reaches_root(const std::vector<std::size_t>& parent, std::size_t root) {
  const std::size_t n = parent.size();
  for (std::size_t v = 0; v < n; ++v) {
    std::size_t cur = v;
    std::size_t steps = 0;
    while (cur != root) {
      if (++steps > n) return false;
      cur = parent[cur];
      if (cur == kNone || cur >= n) return false;
    }
  }
  return true;
}

SquareMatrix prepared_weights(const SquareMatrix& weights, std::size_t root) {
  if (weights.size() == 0) throw DomainError("empty weight matrix");
  if (root >= weights.size()) {
    throw DomainError("root " + std::to_string(root) + " out of range");
  }
  SquareMatrix w = weights;
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (std::isnan(w(i, j)) || w(i, j) == std::numeric_limits<double>::infinity()) {
        throw DomainError("weights must be finite");
      }
    }
    w(i, i) = kNegInf;
    w(i, root) = kNegInf;
  }
  return w;
}

}  // namespace

std::set<UndirectedPair> ArcSet::undirected_view() const {
  std::set<UndirectedPair> out;
  for (const Arc& arc : arcs) out.insert(undirected(arc.from, arc.to));
  return out;
}

std::vector<Arc> DepTree::edges() const {
  std::vector<Arc> out;
  for (std::size_t v = 0; v < parent.size(); ++v) {
    if (parent[v] != kNoParent) out.push_back({parent[v], v});
  }
  return out;
}

std::set<UndirectedPair> DepTree::undirected_view() const {
  std::set<UndirectedPair> out;
  for (const Arc& arc : edges()) out.insert(undirected(arc.from, arc.to));
  return out;
}

double DepTree::total_weight(const SquareMatrix& weights) const {
  return edge_weight_sum(weights, parent);
}

bool DepTree::is_valid() const {
  const std::size_t n = parent.size();
  if (n == 0 || root >= n || parent[root] != kNoParent) return false;
  for (std::size_t v = 0; v < n; ++v) {
    if (v == root) continue;
    if (parent[v] == kNoParent || parent[v] >= n || parent[v] == v) {
      return false;
    }
  }
  return reaches_root(parent, root);
}

ArcSet extract_max_arcs(const SquareMatrix& attention) {
  const std::size_t n = attention.size();
  if (n < 2) {
    throw DomainError("Max extraction needs at least two units, got " +
                      std::to_string(n));
  }
  ArcSet out;
  out.arcs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = i == 0 ? 1 : 0;
    for (std::size_t j = best + 1; j < n; ++j) {
      if (j != i && attention(i, j) > attention(i, best)) best = j;
    }
    out.arcs.push_back({i, best});
  }
  return out;
}

DepTree chu_liu_edmonds(const SquareMatrix& weights, std::size_t root) {
  const SquareMatrix w = prepared_weights(weights, root);
  DepTree tree;
  tree.root = root;
  if (w.size() == 1) {
    tree.parent = {kNone};
    return tree;
  }
  tree.parent = contract_and_solve(w, root);
  return tree;
}

DepTree brute_force_arborescence(const SquareMatrix& weights,
                                 std::size_t root) {
  const SquareMatrix w = prepared_weights(weights, root);
  const std::size_t n = w.size();
  if (n > kBruteForceLimit) {
    throw DomainError("brute-force arborescence refuses " + std::to_string(n) +
                      " nodes (limit " + std::to_string(kBruteForceLimit) + ")");
  }

  DepTree best;
  best.root = root;
  if (n == 1) {
    best.parent = {kNone};
    return best;
  }

  // Odometer over parent vectors in lexicographic order. Slot v ranges over
  // every node except v itself.
  std::vector<std::size_t> slots;
  for (std::size_t v = 0; v < n; ++v) {
    if (v != root) slots.push_back(v);
  }
  const auto choice = [](std::size_t v, std::size_t k) {
    return k < v ? k : k + 1;
  };
  std::vector<std::size_t> digit(slots.size(), 0);
  std::vector<std::size_t> parent(n, kNone);
  for (std::size_t s = 0; s < slots.size(); ++s) {
    parent[slots[s]] = choice(slots[s], 0);
  }

  bool found = false;
  double best_total = kNegInf;
  while (true) {
    if (reaches_root(parent, root)) {
      const double total = edge_weight_sum(w, parent);
      if (!found || total > best_total) {
        best_total = total;
        best.parent = parent;
        found = true;
      }
    }
    std::size_t s = slots.size();
    while (s > 0) {
      --s;
      if (++digit[s] < n - 1) break;
      digit[s] = 0;
      if (s == 0) {
        s = slots.size();
        break;
      }
    }
    if (s == slots.size()) break;
    for (std::size_t k = s; k < slots.size(); ++k) {
      parent[slots[k]] = choice(slots[k], digit[k]);
    }
  }
  return best;
}

DepTree extract_mst_tree(const SquareMatrix& attention, std::size_t gold_root) {
  return chu_liu_edmonds(attention, gold_root);
}

}  // namespace attndep
