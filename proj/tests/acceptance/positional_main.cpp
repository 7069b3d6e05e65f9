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

// Positional baseline against the published English PUD figures. Exits 77
// (skipped) when the treebank is not available locally.

#include <iostream>

#include "acceptance/pud.hpp"
#include "attndep/baselines.hpp"
#include "attndep/treebank.hpp"

int main() {
  using namespace attndep;
  const auto pud = testing::pud_path();
  if (!pud) {
    std::cout << "BLOCKED positional-baseline: English PUD test treebank not found "
                 "(set ATTNDEP_PUD or place en_pud-ud-test.conllu under tests/data)\n";
    return testing::kExitSkip;
  }

  bool ok = testing::check_positional(*pud, std::cout);

  // Corpus shape and the modal offsets the baseline relies on.
  const std::vector<GoldSentence> corpus = read_conllu_file(*pud);
  std::size_t tokens = 0;
  for (const GoldSentence& s : corpus) tokens += s.size();
  const bool shape = corpus.size() == 1000 && tokens == 21176;
  std::cout << (shape ? "PASS" : "FAIL") << " pud-shape: " << corpus.size() << " sentences, "
            << tokens << " tokens (expected 1000, 21176)\n";
  const int amod = most_common_offset(offset_histogram(corpus, "amod"));
  const int det = most_common_offset(offset_histogram(corpus, "det"));
  const bool modes = amod == 1 && det == 1;
  std::cout << (modes ? "PASS" : "FAIL") << " pud-modes: amod " << amod << ", det " << det
            << " (expected +1, +1)\n";
  ok = ok && shape && modes;
  return ok ? 0 : 1;
}
