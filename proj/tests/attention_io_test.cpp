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

#include "attndep/attention_io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "attndep/baselines.hpp"
#include "test_support.hpp"

namespace attndep {
namespace {

ModelToken word(const std::string& s, std::uint32_t b, std::uint32_t e) {
  return {s, CharSpan{b, e}, false};
}
ModelToken special(const std::string& s) { return {s, CharSpan{}, true}; }

AttentionRecord two_token_record() {
  return testing::uniform_heads_record("a", {word("x", 0, 1), word("y", 2, 3)}, 1, 1,
                                       {0.5f, 0.5f, 0.25f, 0.75f});
}

// Random valid record framed by one special token on each side.
AttentionRecord random_record(std::mt19937_64& rng, const std::string& id) {
  const std::size_t words = 1 + rng() % 7;
  const std::uint16_t layers = static_cast<std::uint16_t>(1 + rng() % 3);
  const std::uint16_t heads = static_cast<std::uint16_t>(1 + rng() % 3);
  std::vector<ModelToken> tokens{special("[CLS]")};
  for (std::uint32_t k = 0; k < words; ++k) {
    tokens.push_back(word("t" + std::to_string(k), 2 * k, 2 * k + 1));
  }
  tokens.push_back(special("[SEP]"));
  const std::size_t t = tokens.size();
  const StrippedRecord r = random_attention(t, layers, heads, rng());
  AttentionRecord rec = to_attention_record(r);
  rec.sent_id = id;
  rec.model_tokens = tokens;
  return rec;
}

std::string bytes_of(std::initializer_list<unsigned> values) {
  std::string out;
  for (unsigned v : values) out.push_back(static_cast<char>(v));
  return out;
}

TEST(AtnwWrite, EmptyFileIsHeaderOnly) {
  const std::string bytes = encode_attention({});
  EXPECT_EQ(bytes, bytes_of({'A', 'T', 'N', 'W', 1, 0, 0, 0, 0, 0, 0, 0}));
  EXPECT_EQ(bytes.size(), 12u);
}

TEST(AtnwWrite, MatchesHandAssembledBytes) {
  const std::string expected =
      bytes_of({'A', 'T', 'N', 'W', 1, 0, 0, 0, 1, 0, 0, 0}) +
      bytes_of({1, 0, 0, 0, 'a'}) +          // sent_id
      bytes_of({1, 0, 1, 0, 2, 0}) +         // layers, heads, tokens
      bytes_of({1, 0, 0, 0, 'x', 0, 0, 0, 0, 1, 0, 0, 0, 0}) +
      bytes_of({1, 0, 0, 0, 'y', 2, 0, 0, 0, 3, 0, 0, 0, 0}) +
      bytes_of({0x00, 0x00, 0x00, 0x3F, 0x00, 0x00, 0x00, 0x3F,    // 0.5 0.5
                0x00, 0x00, 0x80, 0x3E, 0x00, 0x00, 0x40, 0x3F});  // 0.25 0.75
  const std::string bytes = encode_attention({two_token_record()});
  EXPECT_EQ(bytes, expected);
  // Float section is the trailing 16 bytes.
  EXPECT_EQ(bytes.size() - (12 + 5 + 6 + 14 + 14), 16u);
}

TEST(AtnwWrite, Deterministic) {
  std::mt19937_64 rng(3);
  std::vector<AttentionRecord> records;
  for (int k = 0; k < 5; ++k) records.push_back(random_record(rng, "s" + std::to_string(k)));
  EXPECT_EQ(encode_attention(records), encode_attention(records));
}

TEST(AtnwWrite, RefusesInvalidRecords) {
  AttentionRecord rec = two_token_record();
  rec.weights[1] = 0.9f;
  EXPECT_THROW(encode_attention({rec}), ValidationError);
  rec = two_token_record();
  rec.weights.pop_back();
  EXPECT_THROW(encode_attention({rec}), ValidationError);
  rec = two_token_record();
  rec.model_tokens[0].is_special = true;  // special with non-empty span
  EXPECT_THROW(encode_attention({rec}), ValidationError);
}

TEST(AtnwRead, SingleRecordThreeTokens) {
  const std::vector<float> row{0.2f, 0.3f, 0.5f};
  std::vector<float> m;
  for (int r = 0; r < 3; ++r) m.insert(m.end(), row.begin(), row.end());
  const AttentionRecord rec = testing::uniform_heads_record(
      "s", {word("a", 0, 1), word("b", 2, 3), word("c", 4, 5)}, 1, 1, m);
  std::istringstream in(encode_attention({rec}));
  const auto records = read_attention_file(in);
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0], rec);
  EXPECT_FLOAT_EQ(records[0].weight(0, 0, 2, 1), 0.3f);
}

TEST(AtnwRead, BadMagic) {
  std::string bytes = encode_attention({});
  bytes.replace(0, 4, "XXXX");
  std::istringstream in(bytes);
  EXPECT_THROW(read_attention_file(in), FormatError);
}

TEST(AtnwRead, BadVersion) {
  std::string bytes = encode_attention({});
  bytes[4] = 2;
  std::istringstream in(bytes);
  EXPECT_THROW(read_attention_file(in), FormatError);
}

TEST(AtnwRead, TruncationReportsByteOffset) {
  const std::string full = encode_attention({two_token_record()});
  for (std::size_t cut : {std::size_t{6}, std::size_t{14}, full.size() - 1}) {
    std::istringstream in(full.substr(0, cut));
    try {
      read_attention_file(in);
      FAIL() << "expected FormatError at cut " << cut;
    } catch (const FormatError& e) {
      EXPECT_NE(std::string(e.what()).find("byte offset"), std::string::npos) << e.what();
    }
  }
}

TEST(AtnwRead, RowSumViolationNamesLocation) {
  // The writer refuses invalid records, so patch a valid encoding:
  // weights[2] becomes 0.5 and row 1 sums to 1.25.
  std::string bytes = encode_attention({two_token_record()});
  const float bad = 0.5f;
  std::memcpy(&bytes[bytes.size() - 8], &bad, 4);
  std::istringstream in(bytes);
  try {
    read_attention_file(in);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("sentence a"), std::string::npos) << msg;
    EXPECT_NE(msg.find("layer 0"), std::string::npos) << msg;
    EXPECT_NE(msg.find("head 0"), std::string::npos) << msg;
    EXPECT_NE(msg.find("row 1"), std::string::npos) << msg;
  }
  std::istringstream again(bytes);
  EXPECT_NO_THROW(read_attention_file(again, /*validate=*/false));
}

TEST(AtnwRoundTrip, ValueAndByteIdentity) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<AttentionRecord> records;
    const int n = trial % 6;
    for (int k = 0; k < n; ++k) records.push_back(random_record(rng, "id-" + std::to_string(k)));
    const std::string bytes = encode_attention(records);
    std::istringstream in(bytes);
    const auto back = read_attention_file(in);
    EXPECT_EQ(back, records);
    EXPECT_EQ(encode_attention(back), bytes);
  }
}

TEST(AtnwRoundTrip, FileAndStreamingReaderAgree) {
  testing::TempDir dir("io");
  std::mt19937_64 rng(4);
  std::vector<AttentionRecord> records;
  for (int k = 0; k < 4; ++k) records.push_back(random_record(rng, "f" + std::to_string(k)));
  write_attention_file(dir.file("a.atnw"), records);
  EXPECT_EQ(read_attention_file(dir.file("a.atnw")), records);

  AttentionFile file(dir.file("a.atnw"));
  EXPECT_EQ(file.reader().sentence_count(), 4u);
  std::size_t k = 0;
  while (auto rec = file.reader().next()) EXPECT_EQ(*rec, records[k++]);
  EXPECT_EQ(k, records.size());
}

TEST(AtnwRead, MissingFileNamesPath) {
  try {
    read_attention_file(std::string("/nonexistent/x.atnw"));
    FAIL() << "expected Error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/x.atnw"), std::string::npos);
  }
}

TEST(StripSpecialTokens, LeadingSpecialKeepsLowerRightBlock) {
  const std::vector<float> m{0.2f, 0.3f, 0.5f,  //
                             0.1f, 0.6f, 0.3f,  //
                             0.4f, 0.4f, 0.2f};
  const AttentionRecord rec = testing::uniform_heads_record(
      "s", {special("[CLS]"), word("a", 0, 1), word("b", 2, 3)}, 1, 1, m);
  const StrippedRecord s = strip_special_tokens(rec);
  ASSERT_EQ(s.n_tokens(), 2u);
  const SquareMatrix h = s.head_matrix(0, 0);
  const double a = 0.6f;
  const double b = 0.3f;
  EXPECT_NEAR(h(0, 0), a / (a + b), 1e-12);
  EXPECT_NEAR(h(0, 1), b / (a + b), 1e-12);
  const double c = 0.4f;
  const double d = 0.2f;
  EXPECT_NEAR(h(1, 0), c / (c + d), 1e-12);
  EXPECT_NEAR(h(1, 1), d / (c + d), 1e-12);
}

TEST(StripSpecialTokens, HandComputedFourTokenExample) {
  // Specials at 0 and 3; inner rows (0.1, 0.3) and (0.2, 0.2).
  const std::vector<float> m{0.25f, 0.25f, 0.25f, 0.25f,  //
                             0.4f,  0.1f,  0.3f,  0.2f,   //
                             0.3f,  0.2f,  0.2f,  0.3f,   //
                             0.25f, 0.25f, 0.25f, 0.25f};
  const AttentionRecord rec = testing::uniform_heads_record(
      "s", {special("[CLS]"), word("a", 0, 1), word("b", 2, 3), special("[SEP]")}, 1, 1,
      m);
  const SquareMatrix h = strip_special_tokens(rec).head_matrix(0, 0);
  EXPECT_NEAR(h(0, 0), 0.25, 1e-7);
  EXPECT_NEAR(h(0, 1), 0.75, 1e-7);
  EXPECT_NEAR(h(1, 0), 0.5, 1e-7);
  EXPECT_NEAR(h(1, 1), 0.5, 1e-7);
}

TEST(StripSpecialTokens, NoSpecialsLeavesStochasticRowsUnchanged) {
  const std::vector<float> m{0.5f, 0.5f, 0.25f, 0.75f};
  const AttentionRecord rec = two_token_record();
  const StrippedRecord s = strip_special_tokens(rec);
  for (std::size_t k = 0; k < m.size(); ++k) {
    EXPECT_EQ(s.weights[k], static_cast<double>(m[k]));
  }
}

TEST(StripSpecialTokens, AllSpecialThrows) {
  const AttentionRecord rec = testing::uniform_heads_record(
      "s", {special("[CLS]"), special("[SEP]")}, 1, 1, {0.5f, 0.5f, 0.5f, 0.5f});
  EXPECT_THROW(strip_special_tokens(rec), DomainError);
}

TEST(StripSpecialTokens, RowsSumToOneAndArgmaxSurvives) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const AttentionRecord rec = random_record(rng, "p");
    const StrippedRecord s = strip_special_tokens(rec);
    const std::size_t t = rec.n_tokens();
    const std::size_t k = s.n_tokens();
    ASSERT_EQ(k, t - 2);
    for (std::size_t l = 0; l < rec.n_layers; ++l) {
      for (std::size_t h = 0; h < rec.n_heads; ++h) {
        const SquareMatrix m = s.head_matrix(l, h);
        for (std::size_t r = 0; r < k; ++r) {
          EXPECT_NEAR(m.row_sum(r), 1.0, 1e-5);
          std::size_t before = 0;
          std::size_t after = 0;
          for (std::size_t c = 1; c < k; ++c) {
            if (rec.weight(l, h, r + 1, c + 1) > rec.weight(l, h, r + 1, before + 1)) before = c;
            if (m(r, c) > m(r, after)) after = c;
          }
          EXPECT_EQ(before, after);
        }
      }
    }
  }
}

TEST(StripSpecialTokens, Idempotent) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const StrippedRecord once = strip_special_tokens(random_record(rng, "i"));
    EXPECT_EQ(strip_special_tokens(once), once);
  }
}

TEST(StripSpecialTokens, RenormalizationCanBeDisabled) {
  const std::vector<float> m{0.25f, 0.25f, 0.25f, 0.25f,  //
                             0.4f,  0.1f,  0.3f,  0.2f,   //
                             0.3f,  0.2f,  0.2f,  0.3f,   //
                             0.25f, 0.25f, 0.25f, 0.25f};
  const AttentionRecord rec = testing::uniform_heads_record(
      "s", {special("[CLS]"), word("a", 0, 1), word("b", 2, 3), special("[SEP]")}, 1, 1,
      m);
  const SquareMatrix h = strip_special_tokens(rec, false).head_matrix(0, 0);
  EXPECT_EQ(h(0, 0), static_cast<double>(0.1f));
  EXPECT_EQ(h(0, 1), static_cast<double>(0.3f));
}

}  // namespace
}  // namespace attndep
