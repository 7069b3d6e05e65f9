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

#ifndef ATTNDEP_SYNTHETIC_HPP_
#define ATTNDEP_SYNTHETIC_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "attndep/attention_io.hpp"
#include "attndep/common.hpp"
#include "attndep/treebank.hpp"

namespace attndep {

// Which way the gold tree is written into a matrix.
enum class TreeEncoding {
  kChildToParent,   // row of each dependent peaks at its head (Max reads this)
  kParentToChild,   // row of each head peaks at its dependents (MST reads this)
};

inline constexpr double kEncodedEdgeWeight = 0.9;
inline constexpr double kEncodedNoiseBound = 0.01;

// Word-level attention encoding the gold tree: 0.9 on every gold edge in the
// chosen direction, noise in (0, 0.01] elsewhere off the diagonal. The
// diagonal pads every row to one common total before normalization, so the
// gold/noise ordering survives row normalization for any sentence length.
SquareMatrix encode_gold_tree(const GoldSentence& sentence,
                              TreeEncoding encoding, std::uint64_t seed);

// ATNW record for a sentence with spans: [CLS] + one model token per gold
// token + [SEP]. Head (0,0) carries kChildToParent, head (0,1)
// kParentToChild, every other head is simplex-uniform random. Requires
// layers >= 1 and heads >= 2.
AttentionRecord gold_tree_record(const GoldSentence& sentence,
                                 std::size_t layers, std::size_t heads,
                                 std::uint64_t seed);

// ATNW record of simplex-uniform random attention over the gold tokens,
// framed by [CLS] and [SEP].
AttentionRecord random_record(const GoldSentence& sentence, std::size_t layers,
                              std::size_t heads, std::uint64_t seed);

}  // namespace attndep

#endif  // ATTNDEP_SYNTHETIC_HPP_
