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

#include <gtest/gtest.h>

#include <cstdlib>
#include <random>

#include "test_support.hpp"

namespace attndep {
namespace {

GoldSentence chain_sentence(const std::string& relation, std::size_t n, int offset) {
  // Every non-root token attaches at `offset`; the root is the token the
  // chain leads to.
  GoldSentence s;
  s.sent_id = "c";
  for (std::size_t k = 1; k <= n; ++k) {
    GoldToken tok;
    tok.index = static_cast<int>(k);
    tok.form = "w";
    const int head = tok.index + offset;
    if (head < 1 || head > static_cast<int>(n)) {
      tok.head = 0;
      tok.deprel = "root";
      s.root_index = tok.index;
    } else {
      tok.head = head;
      tok.deprel = relation;
    }
    s.tokens.push_back(tok);
  }
  return s;
}

TEST(PositionalBaseline, FitUsesMostCommonOffsets) {
  const auto corpus = testing::sample_corpus();
  const PositionalBaseline b = PositionalBaseline::fit(corpus);
  for (const auto& [relation, offset] : b.offsets) {
    EXPECT_NE(offset, 0);
    EXPECT_EQ(offset, most_common_offset(offset_histogram(corpus, relation)));
  }
  EXPECT_EQ(b.offsets.at("det"), 1);
  EXPECT_EQ(b.offsets.at("amod"), 1);
}

TEST(PositionalPredict, AdjacentHeadsAllCorrect) {
  PositionalBaseline b;
  b.offsets["amod"] = 1;
  const GoldSentence s = chain_sentence("amod", 5, 1);
  const auto predictions = positional_predict(b, s, "amod");
  ASSERT_EQ(predictions.size(), 4u);
  for (const auto& p : predictions) EXPECT_TRUE(p.correct(s.size()));
}

TEST(PositionalPredict, OutOfBoundsCountsIncorrect) {
  PositionalBaseline b;
  b.offsets["amod"] = 1;
  // Token 3 attaches leftward to 2, so offset +1 lands at position 4 > T.
  GoldSentence s = chain_sentence("amod", 3, 1);
  s.tokens[2].head = 2;
  s.tokens[2].deprel = "amod";
  s.tokens[1].head = 0;
  s.tokens[1].deprel = "root";
  s.tokens[0].head = 2;
  s.root_index = 2;
  const auto predictions = positional_predict(b, s, "amod");
  ASSERT_EQ(predictions.size(), 2u);
  EXPECT_TRUE(predictions[0].correct(s.size()));
  EXPECT_EQ(predictions[1].predicted_head, 4);
  EXPECT_FALSE(predictions[1].correct(s.size()));
  // A negative prediction is out of bounds too.
  PositionalPrediction p{1, 0, 0};
  EXPECT_FALSE(p.correct(3));
}

TEST(PositionalPredict, UnknownRelationThrows) {
  PositionalBaseline b;
  EXPECT_THROW(positional_predict(b, chain_sentence("amod", 3, 1), "amod"), DomainError);
}

TEST(PositionalPredict, SampleAccuracyMatchesIndependentTally) {
  const auto corpus = testing::sample_corpus();
  const PositionalBaseline b = PositionalBaseline::fit(corpus);
  for (const auto& [relation, offset] : b.offsets) {
    // Oracle: count tokens whose head sits exactly at the offset.
    std::size_t expect = 0;
    std::size_t total = 0;
    std::size_t got = 0;
    for (const GoldSentence& s : corpus) {
      for (const GoldToken& tok : s.tokens) {
        if (tok.head == 0 || tok.deprel != relation) continue;
        ++total;
        if (tok.head - tok.index == offset) ++expect;
      }
      for (const auto& p : positional_predict(b, s, relation)) {
        if (p.correct(s.size())) ++got;
      }
    }
    EXPECT_EQ(got, expect) << relation;
    EXPECT_GT(total, 0u);
  }
}

TEST(RightBranching, SingleUnit) {
  const DepTree t = right_branching_tree(1);
  EXPECT_TRUE(t.is_valid());
  EXPECT_TRUE(t.edges().empty());
}

TEST(RightBranching, FourUnitChain) {
  const DepTree t = right_branching_tree(4);
  EXPECT_EQ(t.undirected_view(), (std::set<UndirectedPair>{{0, 1}, {1, 2}, {2, 3}}));
  EXPECT_EQ(t.root, 0u);
}

TEST(RightBranching, AlwaysValid) {
  for (std::size_t n = 1; n < 200; ++n) {
    const DepTree t = right_branching_tree(n);
    EXPECT_TRUE(t.is_valid());
    EXPECT_EQ(t.edges().size(), n - 1);
  }
  EXPECT_THROW(right_branching_tree(0), DomainError);
}

TEST(RandomAttention, SameSeedSameTensor) {
  EXPECT_EQ(random_attention(7, 3, 4, 17), random_attention(7, 3, 4, 17));
  EXPECT_NE(random_attention(7, 3, 4, 17).weights, random_attention(7, 3, 4, 18).weights);
}

TEST(RandomAttention, RowsOnTheSimplex) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const StrippedRecord r = random_attention(2 + seed % 20, 2, 3, seed);
    for (std::size_t l = 0; l < r.n_layers; ++l) {
      for (std::size_t h = 0; h < r.n_heads; ++h) {
        const SquareMatrix m = r.head_matrix(l, h);
        for (std::size_t row = 0; row < m.size(); ++row) {
          EXPECT_NEAR(m.row_sum(row), 1.0, 1e-6);
          for (std::size_t c = 0; c < m.size(); ++c) {
            EXPECT_GT(m(row, c), 0.0);
            EXPECT_LT(m(row, c), 1.0);
          }
        }
      }
    }
    EXPECT_NO_THROW(validate_record(to_attention_record(r)));
  }
}

TEST(RandomAttention, FirstCoordinateMeanIsOneOverU) {
  // Simplex-uniform rows have E[x_0] = 1/U.
  const std::size_t u = 5;
  const StrippedRecord r = random_attention(u, 40, 50, 3);
  double sum = 0.0;
  std::size_t rows = 0;
  for (std::size_t base = 0; base < r.weights.size(); base += u) {
    sum += r.weights[base];
    ++rows;
  }
  EXPECT_NEAR(sum / static_cast<double>(rows), 1.0 / u, 0.01);
}

TEST(RandomAttention, NeedsTwoUnits) {
  EXPECT_THROW(random_attention(1, 1, 1, 0), DomainError);
}

TEST(SentenceSeed, DistinctPerOrdinal) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t k = 0; k < 1000; ++k) seen.insert(sentence_seed(kDefaultSeed, k));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_EQ(sentence_seed(5, 9), sentence_seed(5, 9));
}

}  // namespace
}  // namespace attndep
