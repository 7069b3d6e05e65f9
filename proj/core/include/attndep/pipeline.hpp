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

#ifndef ATTNDEP_PIPELINE_HPP_
#define ATTNDEP_PIPELINE_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "attndep/attention_io.hpp"
#include "attndep/baselines.hpp"
#include "attndep/evaluation.hpp"
#include "attndep/treebank.hpp"

namespace attndep {

enum class MethodSelection { kMax, kMst, kBoth };

// Everything a command needs. Defaults are the documented CLI defaults.
struct RunConfig {
  std::string treebank_path;
  std::optional<std::string> attention_path;
  MethodSelection method = MethodSelection::kBoth;

  bool positional = true;
  bool right_branching = true;
  bool random = false;
  std::size_t random_layers = 24;
  std::size_t random_heads = 16;

  std::size_t relation_threshold = 100;
  std::string output_dir = "attndep-out";
  std::uint64_t seed = kDefaultSeed;

  bool renormalize = true;
  bool exclude_intra_unit = false;
  bool macro_average = false;

  std::size_t workers = 0;  // 0 = number of logical processors
  bool strict = false;
};

enum ExitCode : int {
  kExitOk = 0,
  kExitWarnings = 1,  // warnings escalated by --strict
  kExitUsage = 2,     // usage or I/O error
};

// Per-relation positional accuracy over gold-token positions.
std::vector<BaselineRow> positional_rows(
    const PositionalBaseline& baseline,
    const std::vector<const GoldSentence*>& sentences,
    const std::vector<std::string>& relations,
    Averaging averaging = Averaging::kMicro);

// Right-branching chain over gold tokens scored like an MST tree:
// kAllRelations (UUAS) plus one row per relation.
std::vector<BaselineRow> right_branching_rows(
    const std::vector<const GoldSentence*>& sentences,
    const std::vector<std::string>& relations,
    Averaging averaging = Averaging::kMicro);

using RecordSource = std::function<std::optional<AttentionRecord>()>;

// strip -> align -> merge -> extract -> score -> aggregate over every
// record the source yields, plus baseline rows over the evaluated
// sentences. Throws Error when no record matches a treebank sentence.
EvalReport evaluate_attention(const std::vector<GoldSentence>& corpus,
                              const RecordSource& source,
                              const RunConfig& config);

// Positional and right-branching rows over the whole treebank, plus
// synthetic-random best-head rows when config.random is set.
EvalReport evaluate_baselines(const std::vector<GoldSentence>& corpus,
                              const RunConfig& config);

// Subcommands. Each writes its report files under config.output_dir,
// prints a summary to `out` and diagnostics to `err`, and returns an
// ExitCode.
int cmd_stats(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_baseline(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_evaluate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_export_format_check(const std::string& attention_path, bool strict,
                            std::ostream& out, std::ostream& err);

enum class SynthesisMode { kGoldTree, kRandom };

// Writes an ATNW file of synthetic attention for every treebank sentence.
int cmd_synthesize(const std::string& treebank_path,
                   const std::string& output_path, SynthesisMode mode,
                   std::size_t layers, std::size_t heads, std::uint64_t seed,
                   std::ostream& out, std::ostream& err);

}  // namespace attndep

#endif  // ATTNDEP_PIPELINE_HPP_
