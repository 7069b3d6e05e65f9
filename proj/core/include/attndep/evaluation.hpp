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

#ifndef ATTNDEP_EVALUATION_HPP_
#define ATTNDEP_EVALUATION_HPP_

#include <cstddef>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "attndep/alignment.hpp"
#include "attndep/extraction.hpp"
#include "attndep/treebank.hpp"

namespace attndep {

// Relation label used for the all-arcs row (UUAS for trees).
inline constexpr const char* kAllRelations = "ALL";

struct UnitGoldArc {
  std::size_t dependent = 0;
  std::size_t head = 0;
  std::string relation;
};

// A gold arc whose endpoints share a unit. It is judged by the
// first-subtoken convention, never by attention.
struct IntraUnitArc {
  std::string relation;
  bool correct = false;
};

struct UnitGoldArcs {
  std::vector<UnitGoldArc> inter;
  std::vector<IntraUnitArc> intra;
};

// Maps every non-root gold arc onto units. Inter-unit arcs are returned for
// scoring against attention; arcs inside one unit are correct iff their head
// is the unit's first gold token.
UnitGoldArcs gold_arcs_at_unit_level(const GoldSentence& gold,
                                     const AlignedSentence& aligned);

struct Count {
  std::size_t correct = 0;
  std::size_t total = 0;

  Count& operator+=(const Count& other) {
    correct += other.correct;
    total += other.total;
    return *this;
  }
  friend bool operator==(const Count&, const Count&) = default;
};

// Per-relation (correct, total) for the Max method, direction ignored.
std::map<std::string, Count> score_max_method(
    const ArcSet& arcs, const std::vector<UnitGoldArc>& gold);

// Undirected overlap between tree edges and gold pairs; total = |gold|.
Count score_uuas(const DepTree& tree, const std::vector<UnitGoldArc>& gold);

// Per-relation undirected accuracy of a tree, used for per-type MST scores.
std::map<std::string, Count> score_tree_by_relation(
    const DepTree& tree, const std::vector<UnitGoldArc>& gold);

// Adds intra-unit convention outcomes to per-relation counts.
void add_intra_unit(std::map<std::string, Count>& counts,
                    const std::vector<IntraUnitArc>& intra);

// Sets counts[kAllRelations] to the sum over every relation row.
void add_all_row(std::map<std::string, Count>& counts);

enum class Averaging { kMicro, kMacro };

// Corpus accumulator for one relation at one head. Micro pools arcs; macro
// averages per-sentence accuracy over sentences containing the relation.
struct Tally {
  std::size_t correct = 0;
  std::size_t total = 0;
  double ratio_sum = 0.0;
  std::size_t sentences = 0;

  void add_sentence(const Count& count);
  void merge(const Tally& other);
  double accuracy(Averaging averaging) const;
};

using RelationTallies = std::map<std::string, Tally>;

enum class Method { kMax, kMst };
const char* method_name(Method method);

// Tallies for every (layer, head) of both methods.
class HeadGrid {
 public:
  HeadGrid() = default;
  HeadGrid(std::size_t layers, std::size_t heads);

  std::size_t layers() const { return layers_; }
  std::size_t heads() const { return heads_; }

  RelationTallies& at(Method method, std::size_t layer, std::size_t head);
  const RelationTallies& at(Method method, std::size_t layer,
                            std::size_t head) const;

  void add_sentence(Method method, std::size_t layer, std::size_t head,
                    const std::map<std::string, Count>& counts);

 private:
  std::size_t layers_ = 0;
  std::size_t heads_ = 0;
  std::vector<RelationTallies> max_;
  std::vector<RelationTallies> mst_;
};

struct HeadScore {
  Method method = Method::kMax;
  std::size_t layer = 0;
  std::size_t head = 0;
  std::string relation;
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy = 0.0;
};

struct BestHead {
  std::size_t layer = 0;
  std::size_t head = 0;
  double accuracy = 0.0;
  std::size_t correct = 0;
  std::size_t total = 0;
};

// A trivial-baseline accuracy for one relation (or kAllRelations).
struct BaselineRow {
  std::string baseline;  // "positional" or "right-branching"
  std::string relation;
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy = 0.0;
};

struct EvalReport {
  std::string attention_source;  // file name, "synthetic-random", or ""
  Averaging averaging = Averaging::kMicro;
  bool exclude_intra_unit = false;
  std::vector<std::string> methods;
  std::vector<std::string> relations;
  std::size_t layers = 0;
  std::size_t heads = 0;

  std::vector<HeadScore> per_head_scores;
  // method name -> relation -> best head
  std::map<std::string, std::map<std::string, BestHead>> best_per_relation;
  std::map<std::pair<std::size_t, std::size_t>, double> uuas_per_head;
  std::map<std::size_t, double> max_uuas_per_layer;
  std::vector<BaselineRow> baselines;

  std::map<std::string, std::size_t> sentence_counts;  // evaluated, excluded_*
  std::vector<std::string> warnings;
};

struct AggregationOptions {
  Averaging averaging = Averaging::kMicro;
  std::vector<Method> methods{Method::kMax, Method::kMst};
  std::vector<std::string> relations;  // rows to report besides ALL
};

// The fixed relation list of the per-type table.
const std::vector<std::string>& table_relations();

// Table relations, always advcl and csubj, and any relation with more than
// `threshold` arcs; restricted to relations that actually occur.
std::vector<std::string> select_relations(
    const std::map<std::string, std::size_t>& frequencies,
    std::size_t threshold);

// Best head per relation and per-layer maximum UUAS. Throws DomainError when
// the grid is empty.
EvalReport aggregate_best_heads(const HeadGrid& grid,
                                const AggregationOptions& options);

// Report serialization. Column schemas are documented in the README.
void write_report_json(std::ostream& out, const EvalReport& report);
void write_per_head_csv(std::ostream& out, const EvalReport& report);
void write_accuracy_by_type_csv(std::ostream& out, const EvalReport& report);
void write_uuas_by_layer_csv(std::ostream& out, const EvalReport& report);
void write_best_head_table(std::ostream& out, const EvalReport& report);

}  // namespace attndep

#endif  // ATTNDEP_EVALUATION_HPP_
