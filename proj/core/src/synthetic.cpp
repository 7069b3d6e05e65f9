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

#include "attndep/synthetic.hpp"

#include <algorithm>
#include <random>

#include "attndep/baselines.hpp"

namespace attndep {
namespace {

constexpr float kSpecialColumnMass = 0.01f;

ModelToken special(const char* surface) { return {surface, CharSpan{}, true}; }

// Wraps word-level rows with [CLS]/[SEP] columns carrying a constant mass,
// so every word row loses the same share and the word block keeps its
// relative ordering across rows.
void embed_framed(const SquareMatrix& words, float* dst) {
  const std::size_t u = words.size();
  const std::size_t t = u + 2;
  const float uniform = 1.0f / static_cast<float>(t);
  for (std::size_t c = 0; c < t; ++c) dst[c] = uniform;
  for (std::size_t c = 0; c < t; ++c) dst[(t - 1) * t + c] = uniform;
  const double keep = 1.0 - 2.0 * kSpecialColumnMass;
  for (std::size_t r = 0; r < u; ++r) {
    float* row = dst + (r + 1) * t;
    row[0] = kSpecialColumnMass;
    row[t - 1] = kSpecialColumnMass;
    for (std::size_t c = 0; c < u; ++c) {
      row[c + 1] = static_cast<float>(keep * words(r, c));
    }
  }
}

GoldSentence with_spans(const GoldSentence& sentence) {
  return sentence.has_spans() ? sentence : reconstruct_spans(sentence);
}

AttentionRecord framed_record(const GoldSentence& sentence, std::size_t layers,
                              std::size_t heads) {
  AttentionRecord rec;
  rec.sent_id = sentence.sent_id;
  rec.n_layers = static_cast<std::uint16_t>(layers);
  rec.n_heads = static_cast<std::uint16_t>(heads);
  rec.model_tokens.push_back(special("[CLS]"));
  for (const GoldToken& tok : sentence.tokens) {
    rec.model_tokens.push_back({tok.form, *tok.span, false});
  }
  rec.model_tokens.push_back(special("[SEP]"));
  const std::size_t t = rec.model_tokens.size();
  rec.weights.assign(layers * heads * t * t, 0.0f);
  return rec;
}

SquareMatrix random_words(std::size_t units, std::uint64_t seed) {
  if (units < 2) return SquareMatrix(units, 1.0);
  const StrippedRecord r = random_attention(units, 1, 1, seed);
  return r.head_matrix(0, 0);
}

}  // namespace

SquareMatrix encode_gold_tree(const GoldSentence& sentence,
                              TreeEncoding encoding, std::uint64_t seed) {
  const std::size_t u = sentence.size();
  SquareMatrix m(u, 0.0);
  if (u == 0) return m;
  std::mt19937_64 rng(seed);
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  for (std::size_t r = 0; r < u; ++r) {
    for (std::size_t c = 0; c < u; ++c) {
      if (r == c) continue;
      // (0, bound]
      m(r, c) = kEncodedNoiseBound *
                (1.0 - static_cast<double>(rng() >> 11) * kScale);
    }
  }
  for (const GoldToken& tok : sentence.tokens) {
    if (tok.head == 0) continue;
    const std::size_t dep = static_cast<std::size_t>(tok.index - 1);
    const std::size_t head = static_cast<std::size_t>(tok.head - 1);
    if (encoding == TreeEncoding::kChildToParent) {
      m(dep, head) = kEncodedEdgeWeight;
    } else {
      m(head, dep) = kEncodedEdgeWeight;
    }
  }
  double widest = 0.0;
  for (std::size_t r = 0; r < u; ++r) widest = std::max(widest, m.row_sum(r));
  const double total = widest + 0.1;
  for (std::size_t r = 0; r < u; ++r) {
    m(r, r) = total - m.row_sum(r);
    for (std::size_t c = 0; c < u; ++c) m(r, c) /= total;
  }
  return m;
}

AttentionRecord gold_tree_record(const GoldSentence& sentence,
                                 std::size_t layers, std::size_t heads,
                                 std::uint64_t seed) {
  if (layers < 1 || heads < 2) {
    throw DomainError("gold-tree synthesis needs >= 1 layer and >= 2 heads");
  }
  const GoldSentence gold = with_spans(sentence);
  AttentionRecord rec = framed_record(gold, layers, heads);
  const std::size_t t = rec.n_tokens();
  for (std::size_t l = 0; l < layers; ++l) {
    for (std::size_t h = 0; h < heads; ++h) {
      const std::uint64_t head_seed = sentence_seed(seed, l * heads + h);
      SquareMatrix words;
      if (l == 0 && h == 0) {
        words = encode_gold_tree(gold, TreeEncoding::kChildToParent, head_seed);
      } else if (l == 0 && h == 1) {
        words = encode_gold_tree(gold, TreeEncoding::kParentToChild, head_seed);
      } else {
        words = random_words(gold.size(), head_seed);
      }
      embed_framed(words, rec.weights.data() + (l * heads + h) * t * t);
    }
  }
  return rec;
}

AttentionRecord random_record(const GoldSentence& sentence, std::size_t layers,
                              std::size_t heads, std::uint64_t seed) {
  const GoldSentence gold = with_spans(sentence);
  AttentionRecord rec = framed_record(gold, layers, heads);
  const std::size_t t = rec.n_tokens();
  for (std::size_t lh = 0; lh < layers * heads; ++lh) {
    embed_framed(random_words(gold.size(), sentence_seed(seed, lh)),
                 rec.weights.data() + lh * t * t);
  }
  return rec;
}

}  // namespace attndep
