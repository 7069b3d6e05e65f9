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

#include "attndep/baselines.hpp"

#include <cmath>
#include <random>

namespace attndep {

PositionalBaseline PositionalBaseline::fit(
    const std::vector<GoldSentence>& corpus) {
  PositionalBaseline baseline;
  for (const auto& [relation, hist] : offset_histograms(corpus)) {
    baseline.offsets[relation] = most_common_offset(hist);
  }
  return baseline;
}

std::vector<PositionalPrediction> positional_predict(
    const PositionalBaseline& baseline, const GoldSentence& sentence,
    const std::string& relation) {
  const auto it = baseline.offsets.find(relation);
  if (it == baseline.offsets.end()) {
    throw DomainError("positional baseline has no offset for '" + relation +
                      "'");
  }
  std::vector<PositionalPrediction> out;
  for (const GoldToken& tok : sentence.tokens) {
    if (tok.head == 0 || tok.deprel != relation) continue;
    out.push_back({tok.index, tok.index + it->second, tok.head});
  }
  return out;
}

DepTree right_branching_tree(std::size_t units) {
  if (units == 0) throw DomainError("right-branching tree needs a unit");
  DepTree tree;
  tree.root = 0;
  tree.parent.resize(units);
  tree.parent[0] = DepTree::kNoParent;
  for (std::size_t i = 1; i < units; ++i) tree.parent[i] = i - 1;
  return tree;
}

std::uint64_t sentence_seed(std::uint64_t seed, std::uint64_t ordinal) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (ordinal + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

StrippedRecord random_attention(std::size_t units, std::size_t layers,
                                std::size_t heads, std::uint64_t seed) {
  if (units < 2) throw DomainError("random attention needs at least 2 units");
  StrippedRecord out;
  out.sent_id = "random-" + std::to_string(seed);
  out.n_layers = layers;
  out.n_heads = heads;
  out.model_tokens.reserve(units);
  for (std::size_t i = 0; i < units; ++i) {
    out.model_tokens.push_back(
        {"<" + std::to_string(i) + ">",
         CharSpan{static_cast<std::uint32_t>(i),
                  static_cast<std::uint32_t>(i + 1)},
         false});
  }
  out.weights.resize(layers * heads * units * units);

  std::mt19937_64 rng(seed);
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  for (std::size_t base = 0; base < out.weights.size(); base += units) {
    double sum = 0.0;
    for (std::size_t c = 0; c < units; ++c) {
      const double u = static_cast<double>(rng() >> 11) * kScale;
      const double draw = -std::log1p(-u);
      out.weights[base + c] = draw;
      sum += draw;
    }
    for (std::size_t c = 0; c < units; ++c) out.weights[base + c] /= sum;
  }
  return out;
}

}  // namespace attndep
