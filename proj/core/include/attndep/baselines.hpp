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

#ifndef ATTNDEP_BASELINES_HPP_
#define ATTNDEP_BASELINES_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "attndep/attention_io.hpp"
#include "attndep/extraction.hpp"
#include "attndep/treebank.hpp"

namespace attndep {

// Most common signed head offset per relation, estimated on a treebank.
struct PositionalBaseline {
  std::map<std::string, int> offsets;

  static PositionalBaseline fit(const std::vector<GoldSentence>& corpus);
};

struct PositionalPrediction {
  int dependent = 0;
  int predicted_head = 0;  // may fall outside [1, T]
  int gold_head = 0;

  bool correct(std::size_t sentence_length) const {
    return predicted_head >= 1 &&
           predicted_head <= static_cast<int>(sentence_length) &&
           predicted_head == gold_head;
  }
};

// Predicted head for every gold arc of `relation` in the sentence. Throws
// DomainError for a relation the baseline was not fitted on.
std::vector<PositionalPrediction> positional_predict(
    const PositionalBaseline& baseline, const GoldSentence& sentence,
    const std::string& relation);

// Chain over U units rooted at unit 0.
DepTree right_branching_tree(std::size_t units);

inline constexpr std::uint64_t kDefaultSeed = 17;

// Rows drawn uniformly from the simplex (normalized unit exponentials);
// deterministic for a given seed. Tokens are synthetic and carry no spans.
StrippedRecord random_attention(std::size_t units, std::size_t layers,
                                std::size_t heads, std::uint64_t seed);

// Derives an independent per-sentence seed from a run seed and an ordinal.
std::uint64_t sentence_seed(std::uint64_t seed, std::uint64_t ordinal);

}  // namespace attndep

#endif  // ATTNDEP_BASELINES_HPP_
