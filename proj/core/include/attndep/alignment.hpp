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

#ifndef ATTNDEP_ALIGNMENT_HPP_
#define ATTNDEP_ALIGNMENT_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "attndep/attention_io.hpp"
#include "attndep/common.hpp"
#include "attndep/treebank.hpp"

namespace attndep {

// Contiguous half-open index range.
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool contains(std::size_t i) const { return i >= begin && i < end; }
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

// A pair of token runs, one from each tokenization, that end at the same
// character position.
struct SpanGroup {
  IndexRange left;
  IndexRange right;
  friend bool operator==(const SpanGroup&, const SpanGroup&) = default;
};

// Two-pointer sweep producing the finest common segmentation of two span
// sequences. Only end positions are compared. Throws AlignmentError if the
// sequences never reach a common end.
std::vector<SpanGroup> align_spans(std::span<const CharSpan> left,
                                   std::span<const CharSpan> right);

struct AlignedUnit {
  IndexRange gold;   // 0-based positions into GoldSentence::tokens
  IndexRange model;  // positions into StrippedRecord::model_tokens
  CharSpan span;
};

struct AlignedSentence {
  std::string sent_id;
  std::vector<AlignedUnit> units;
  std::vector<std::size_t> gold_to_unit;  // 0-based gold position -> unit
  std::size_t root_unit = 0;

  std::size_t size() const { return units.size(); }
  std::vector<std::size_t> model_to_unit() const;
};

// Requires gold spans to be filled. Throws AlignmentError naming sent_id.
AlignedSentence align_tokenizations(const GoldSentence& gold,
                                    const StrippedRecord& record);

// Alignment where every gold token is its own unit (no model tokenization).
AlignedSentence identity_alignment(const GoldSentence& gold);

using UnitAttention = SquareMatrix;

// Sums columns, then rows, of each unit and renormalizes rows.
UnitAttention merge_attention(const SquareMatrix& matrix,
                              const AlignedSentence& aligned);

// Same, without the final renormalization. Exposed for the mass-preservation
// property.
SquareMatrix merge_attention_unnormalized(const SquareMatrix& matrix,
                                          const AlignedSentence& aligned);

}  // namespace attndep

#endif  // ATTNDEP_ALIGNMENT_HPP_
