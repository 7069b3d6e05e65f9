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

#include <cstdint>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "attndep/pipeline.hpp"

namespace {

using attndep::MethodSelection;
using attndep::RunConfig;
using attndep::SynthesisMode;

void add_treebank_options(CLI::App& cmd, RunConfig& config) {
  cmd.add_option("--treebank,-t", config.treebank_path, "CoNLL-U treebank")
      ->required();
  cmd.add_option("--out,-o", config.output_dir, "Output directory")
      ->capture_default_str();
  cmd.add_option("--threshold", config.relation_threshold,
                 "Report any relation with more than this many arcs")
      ->capture_default_str();
  cmd.add_flag("--macro-average", config.macro_average,
               "Average per-sentence accuracies instead of pooling arcs");
  cmd.add_flag("--strict", config.strict, "Exit 1 when warnings were emitted");
}

void add_scoring_options(CLI::App& cmd, RunConfig& config) {
  const std::map<std::string, MethodSelection> methods{
      {"max", MethodSelection::kMax},
      {"mst", MethodSelection::kMst},
      {"both", MethodSelection::kBoth}};
  cmd.add_option("--method", config.method, "Extraction method")
      ->transform(CLI::CheckedTransformer(methods, CLI::ignore_case))
      ->default_str("both");
  cmd.add_option("--workers", config.workers,
                 "Worker threads; 0 uses every logical processor")
      ->capture_default_str();
  cmd.add_flag("--exclude-intra-unit", config.exclude_intra_unit,
               "Leave arcs inside one aligned unit out of every denominator");
  cmd.add_flag("!--no-positional", config.positional,
               "Skip the positional baseline");
  cmd.add_flag("!--no-right-branching", config.right_branching,
               "Skip the right-branching baseline");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dependency structure in transformer attention"};
  app.set_config("--config", "", "Key-value configuration file");
  app.require_subcommand(1);

  RunConfig config;

  CLI::App* stats = app.add_subcommand(
      "stats", "Relative-position histograms and the positional baseline");
  add_treebank_options(*stats, config);

  CLI::App* baseline = app.add_subcommand(
      "baseline", "Positional, right-branching and random baselines");
  add_treebank_options(*baseline, config);
  add_scoring_options(*baseline, config);
  baseline->add_flag("--random", config.random,
                     "Add best-head rows for simplex-uniform random attention");
  baseline->add_option("--seed", config.seed, "Seed for --random attention")
      ->capture_default_str();
  baseline->add_option("--random-layers", config.random_layers,
                       "Layers of random attention")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  baseline->add_option("--random-heads", config.random_heads,
                       "Heads per layer of random attention")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "Score every attention head against the treebank");
  add_treebank_options(*evaluate, config);
  add_scoring_options(*evaluate, config);
  std::string attention_path;
  evaluate->add_option("--attention,-a", attention_path, "ATNW attention file")
      ->required();
  evaluate->add_flag("!--no-renormalize", config.renormalize,
                     "Keep row mass lost to special tokens");

  CLI::App* check = app.add_subcommand("export-format-check",
                                       "Validate an ATNW attention file");
  std::string check_path;
  bool check_strict = false;
  check->add_option("file", check_path, "ATNW file")->required();
  check->add_flag("--strict", check_strict, "Exit 1 when warnings were emitted");

  CLI::App* synthesize = app.add_subcommand(
      "synthesize", "Write synthetic ATNW attention for a treebank");
  std::string synth_treebank;
  std::string synth_out;
  SynthesisMode synth_mode = SynthesisMode::kGoldTree;
  std::size_t synth_layers = 2;
  std::size_t synth_heads = 4;
  std::uint64_t synth_seed = attndep::kDefaultSeed;
  synthesize->add_option("--treebank,-t", synth_treebank, "CoNLL-U treebank")
      ->required();
  synthesize->add_option("--out,-o", synth_out, "Output ATNW file")->required();
  synthesize
      ->add_option("--mode", synth_mode,
                   "gold-tree: heads (0,0) and (0,1) encode the gold tree; "
                   "random: every head is random")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, SynthesisMode>{
              {"gold-tree", SynthesisMode::kGoldTree},
              {"random", SynthesisMode::kRandom}},
          CLI::ignore_case))
      ->default_str("gold-tree");
  synthesize->add_option("--layers", synth_layers, "Layers per record")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  synthesize->add_option("--heads", synth_heads,
                          "Heads per layer; gold-tree mode needs at least 2")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  synthesize->add_option("--seed", synth_seed, "Noise and random-head seed")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : attndep::kExitUsage;
  }

  if (*stats) return attndep::cmd_stats(config, std::cout, std::cerr);
  if (*baseline) return attndep::cmd_baseline(config, std::cout, std::cerr);
  if (*evaluate) {
    config.attention_path = attention_path;
    return attndep::cmd_evaluate(config, std::cout, std::cerr);
  }
  if (*check) {
    return attndep::cmd_export_format_check(check_path, check_strict, std::cout,
                                            std::cerr);
  }
  if (*synthesize) {
    if (synth_mode == SynthesisMode::kGoldTree && synth_heads < 2) {
      std::cerr << "error: --mode gold-tree needs --heads >= 2\n";
      return attndep::kExitUsage;
    }
    return attndep::cmd_synthesize(synth_treebank, synth_out, synth_mode,
                                   synth_layers, synth_heads, synth_seed,
                                   std::cout, std::cerr);
  }
  return attndep::kExitUsage;
}
