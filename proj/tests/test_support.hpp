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

#ifndef ATTNDEP_TESTS_TEST_SUPPORT_HPP_
#define ATTNDEP_TESTS_TEST_SUPPORT_HPP_

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "attndep/attention_io.hpp"
#include "attndep/common.hpp"
#include "attndep/treebank.hpp"

namespace attndep::testing {

inline std::string data_path(const std::string& name) {
  return std::string(ATTNDEP_TEST_DATA_DIR) + "/" + name;
}

inline std::vector<GoldSentence> sample_corpus() {
  return read_conllu_file(data_path("sample.conllu"));
}

inline std::vector<GoldSentence> parse_string(const std::string& text,
                                              ParseDiagnostics* diag = nullptr) {
  std::istringstream in(text);
  return parse_conllu(in, diag);
}

inline std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("attndep-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

// Strictly positive matrix with off-diagonal entries uniform in (0, 1].
inline SquareMatrix random_matrix(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  SquareMatrix m(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) m(r, c) = 1.0 - dist(rng);
  }
  return m;
}

// Random labelled tree over n >= 1 tokens: a random order, each token after
// the first attaching to an earlier one. Forms are "w1".."wn", separated by
// single spaces, so spans are reconstructible.
inline GoldSentence random_tree(std::size_t n, std::mt19937_64& rng,
                                const std::string& sent_id) {
  static const std::vector<std::string> kRelations{
      "nsubj", "obj", "advmod", "amod", "case", "det", "obl", "nmod",
      "punct", "aux", "conj", "cc", "mark", "advcl", "csubj"};
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 1);
  std::shuffle(order.begin(), order.end(), rng);

  GoldSentence s;
  s.sent_id = sent_id;
  s.tokens.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const int index = order[k];
    GoldToken& tok = s.tokens[static_cast<std::size_t>(index - 1)];
    tok.index = index;
    tok.form = "w" + std::to_string(index);
    if (k == 0) {
      tok.head = 0;
      tok.deprel = "root";
      s.root_index = index;
    } else {
      tok.head = order[std::uniform_int_distribution<std::size_t>(0, k - 1)(rng)];
      tok.deprel = kRelations[std::uniform_int_distribution<std::size_t>(
          0, kRelations.size() - 1)(rng)];
    }
  }
  for (const GoldToken& tok : s.tokens) {
    if (!s.text.empty()) s.text.push_back(' ');
    s.text += tok.form;
  }
  return s;
}

// AttentionRecord whose every row of every head is `rows` (T x T).
inline AttentionRecord uniform_heads_record(const std::string& sent_id,
                                            std::vector<ModelToken> tokens,
                                            std::uint16_t layers,
                                            std::uint16_t heads,
                                            const std::vector<float>& matrix) {
  AttentionRecord rec;
  rec.sent_id = sent_id;
  rec.n_layers = layers;
  rec.n_heads = heads;
  rec.model_tokens = std::move(tokens);
  for (std::size_t k = 0; k < static_cast<std::size_t>(layers) * heads; ++k) {
    rec.weights.insert(rec.weights.end(), matrix.begin(), matrix.end());
  }
  return rec;
}

}  // namespace attndep::testing

#endif  // ATTNDEP_TESTS_TEST_SUPPORT_HPP_
