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

#ifndef ATTNDEP_TREEBANK_HPP_
#define ATTNDEP_TREEBANK_HPP_

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "attndep/common.hpp"

namespace attndep {

// One syntactic word of a CoNLL-U sentence. `index` is 1-based and `head`
// is 0 for the root.
struct GoldToken {
  int index = 0;
  std::string form;
  int head = 0;
  std::string deprel;  // Universal part only; subtypes are stripped.
  std::optional<CharSpan> span;

  friend bool operator==(const GoldToken&, const GoldToken&) = default;
};

struct GoldSentence {
  std::string sent_id;
  std::string text;
  std::vector<GoldToken> tokens;
  int root_index = 0;

  std::size_t size() const { return tokens.size(); }
  const GoldToken& token(int index) const { return tokens[index - 1]; }
  bool has_spans() const;

  friend bool operator==(const GoldSentence&, const GoldSentence&) = default;
};

// Non-fatal problems found while reading a treebank.
struct ParseDiagnostics {
  std::size_t dropped_empty_nodes = 0;
  std::size_t dropped_bad_root = 0;
  std::size_t dropped_not_tree = 0;
  std::vector<std::string> warnings;

  std::size_t dropped() const {
    return dropped_empty_nodes + dropped_bad_root + dropped_not_tree;
  }
};

// Reads CoNLL-U. Multiword-token ranges are skipped; sentences containing
// empty nodes, lacking a unique root or whose heads do not form a tree are
// dropped and reported through `diagnostics`. Malformed rows throw
// ParseError with the 1-based line number.
std::vector<GoldSentence> parse_conllu(std::istream& input,
                                       ParseDiagnostics* diagnostics = nullptr);
std::vector<GoldSentence> read_conllu_file(const std::string& path,
                                           ParseDiagnostics* diagnostics = nullptr);

// Writes the consumed columns (ID, FORM, HEAD, DEPREL) back as CoNLL-U with
// the remaining columns set to "_".
void write_token_table(std::ostream& out, const GoldSentence& sentence);

// Strips a deprel subtype: "nsubj:pass" -> "nsubj".
std::string universal_relation(const std::string& deprel);

// Fills token spans by a left-to-right cursor search of each form in
// `sentence.text`. Throws AlignmentError naming sent_id and token index.
GoldSentence reconstruct_spans(const GoldSentence& sentence);

// Signed offset (head index - dependent index) distribution for one relation.
struct OffsetHistogram {
  std::string relation;
  std::map<int, std::size_t> counts;

  std::size_t total() const;
};

// Throws DomainError if the relation never occurs.
OffsetHistogram offset_histogram(const std::vector<GoldSentence>& corpus,
                                 const std::string& relation);

// Histograms for every relation that occurs on a non-root arc, keyed by label.
std::map<std::string, OffsetHistogram> offset_histograms(
    const std::vector<GoldSentence>& corpus);

// Mode of the histogram; ties go to the smaller |offset|, then to the
// negative side.
int most_common_offset(const OffsetHistogram& histogram);

// Number of gold arcs (root arcs excluded) carrying each relation.
std::map<std::string, std::size_t> relation_frequencies(
    const std::vector<GoldSentence>& corpus);

}  // namespace attndep

#endif  // ATTNDEP_TREEBANK_HPP_
