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

#include "attndep/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>

#include <tbb/blocked_range.h>
#include <tbb/global_control.h>
#include <tbb/info.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include "attndep/alignment.hpp"
#include "attndep/synthetic.hpp"

namespace attndep {
namespace {

constexpr std::size_t kMaxListedIds = 20;

struct PreparedSentence {
  const GoldSentence* gold = nullptr;
  AlignedSentence aligned;
  UnitGoldArcs arcs;
};

std::vector<Method> methods_of(MethodSelection selection) {
  switch (selection) {
    case MethodSelection::kMax:
      return {Method::kMax};
    case MethodSelection::kMst:
      return {Method::kMst};
    case MethodSelection::kBoth:
      break;
  }
  return {Method::kMax, Method::kMst};
}

int worker_count(const RunConfig& config) {
  if (config.workers > 0) return static_cast<int>(config.workers);
  return tbb::info::default_concurrency();
}

Averaging averaging_of(const RunConfig& config) {
  return config.macro_average ? Averaging::kMacro : Averaging::kMicro;
}

BaselineRow make_row(const std::string& baseline, const std::string& relation,
                     const Tally& tally, Averaging averaging) {
  return {baseline, relation, tally.correct, tally.total,
          tally.accuracy(averaging)};
}

// Scores one unit-level attention matrix with every requested method into
// the grid cell for (layer, head). Each cell is touched by one task only.
void score_head(const SquareMatrix& unit_attention,
                const PreparedSentence& sentence,
                const std::vector<Method>& methods, bool exclude_intra_unit,
                std::size_t layer, std::size_t head, HeadGrid& grid) {
  for (Method method : methods) {
    std::map<std::string, Count> counts;
    if (method == Method::kMax) {
      counts = score_max_method(extract_max_arcs(unit_attention),
                                sentence.arcs.inter);
      if (!exclude_intra_unit) add_intra_unit(counts, sentence.arcs.intra);
      add_all_row(counts);
    } else {
      const DepTree tree =
          extract_mst_tree(unit_attention, sentence.aligned.root_unit);
      counts = score_tree_by_relation(tree, sentence.arcs.inter);
      Count uuas = score_uuas(tree, sentence.arcs.inter);
      if (!exclude_intra_unit) {
        add_intra_unit(counts, sentence.arcs.intra);
        for (const IntraUnitArc& arc : sentence.arcs.intra) {
          ++uuas.total;
          if (arc.correct) ++uuas.correct;
        }
      }
      counts[kAllRelations] = uuas;
    }
    grid.add_sentence(method, layer, head, counts);
  }
}

std::vector<BaselineRow> right_branching_prepared(
    const std::vector<PreparedSentence>& sentences,
    const std::vector<std::string>& relations, bool exclude_intra_unit,
    Averaging averaging) {
  RelationTallies tallies;
  for (const PreparedSentence& s : sentences) {
    const DepTree tree = right_branching_tree(s.aligned.size());
    std::map<std::string, Count> counts =
        score_tree_by_relation(tree, s.arcs.inter);
    Count uuas = score_uuas(tree, s.arcs.inter);
    if (!exclude_intra_unit) {
      add_intra_unit(counts, s.arcs.intra);
      for (const IntraUnitArc& arc : s.arcs.intra) {
        ++uuas.total;
        if (arc.correct) ++uuas.correct;
      }
    }
    counts[kAllRelations] = uuas;
    for (const auto& [relation, c] : counts) tallies[relation].add_sentence(c);
  }
  std::vector<BaselineRow> rows;
  for (const std::string& relation : relations) {
    const auto it = tallies.find(relation);
    if (it != tallies.end() && it->second.total > 0) {
      rows.push_back(make_row("right-branching", relation, it->second, averaging));
    }
  }
  rows.push_back(make_row("right-branching", kAllRelations,
                          tallies[kAllRelations], averaging));
  return rows;
}

std::map<std::string, std::size_t> frequencies_of(
    const std::vector<const GoldSentence*>& sentences) {
  std::map<std::string, std::size_t> freq;
  for (const GoldSentence* s : sentences) {
    for (const GoldToken& tok : s->tokens) {
      if (tok.head != 0) ++freq[tok.deprel];
    }
  }
  return freq;
}

std::string list_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size() && i < kMaxListedIds; ++i) {
    if (!out.empty()) out += ", ";
    out += ids[i];
  }
  if (ids.size() > kMaxListedIds) {
    out += ", ... (" + std::to_string(ids.size() - kMaxListedIds) + " more)";
  }
  return out;
}

std::filesystem::path prepare_output_dir(const RunConfig& config) {
  std::filesystem::path dir(config.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw Error("cannot create output directory '" + config.output_dir +
                "': " + ec.message());
  }
  return dir;
}

template <typename Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  writer(out);
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

void write_report_files(const std::filesystem::path& dir,
                        const std::string& json_name,
                        const EvalReport& report) {
  write_file(dir / json_name,
             [&](std::ostream& o) { write_report_json(o, report); });
  write_file(dir / "per_head.csv",
             [&](std::ostream& o) { write_per_head_csv(o, report); });
  write_file(dir / "accuracy_by_type.csv",
             [&](std::ostream& o) { write_accuracy_by_type_csv(o, report); });
  write_file(dir / "uuas_by_layer.csv",
             [&](std::ostream& o) { write_uuas_by_layer_csv(o, report); });
}

std::vector<GoldSentence> load_treebank(const RunConfig& config,
                                        std::ostream& err,
                                        std::size_t& warnings) {
  if (config.treebank_path.empty()) throw Error("no treebank given");
  if (!std::filesystem::exists(config.treebank_path)) {
    throw Error("treebank '" + config.treebank_path + "' does not exist");
  }
  ParseDiagnostics diagnostics;
  std::vector<GoldSentence> corpus =
      read_conllu_file(config.treebank_path, &diagnostics);
  for (const std::string& w : diagnostics.warnings) {
    err << "warning: " << w << '\n';
  }
  warnings += diagnostics.warnings.size();
  return corpus;
}

int finish(std::size_t warnings, const RunConfig& config) {
  return warnings > 0 && config.strict ? kExitWarnings : kExitOk;
}

}  // namespace

std::vector<BaselineRow> positional_rows(
    const PositionalBaseline& baseline,
    const std::vector<const GoldSentence*>& sentences,
    const std::vector<std::string>& relations, Averaging averaging) {
  std::vector<BaselineRow> rows;
  for (const std::string& relation : relations) {
    if (!baseline.offsets.count(relation)) continue;
    Tally tally;
    for (const GoldSentence* s : sentences) {
      Count c;
      for (const PositionalPrediction& p :
           positional_predict(baseline, *s, relation)) {
        ++c.total;
        if (p.correct(s->size())) ++c.correct;
      }
      tally.add_sentence(c);
    }
    if (tally.total > 0) {
      rows.push_back(make_row("positional", relation, tally, averaging));
    }
  }
  return rows;
}

std::vector<BaselineRow> right_branching_rows(
    const std::vector<const GoldSentence*>& sentences,
    const std::vector<std::string>& relations, Averaging averaging) {
  std::vector<PreparedSentence> prepared;
  prepared.reserve(sentences.size());
  for (const GoldSentence* s : sentences) {
    PreparedSentence p;
    p.gold = s;
    p.aligned = identity_alignment(*s);
    p.arcs = gold_arcs_at_unit_level(*s, p.aligned);
    prepared.push_back(std::move(p));
  }
  return right_branching_prepared(prepared, relations, false, averaging);
}

EvalReport evaluate_attention(const std::vector<GoldSentence>& corpus,
                              const RecordSource& source,
                              const RunConfig& config) {
  const std::vector<Method> methods = methods_of(config.method);
  std::vector<std::string> warnings;

  std::map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (!by_id.emplace(corpus[i].sent_id, i).second) {
      warnings.push_back("duplicate treebank sent_id " + corpus[i].sent_id +
                         "; keeping the first");
    }
  }

  std::map<std::string, std::size_t> counts{
      {"treebank_sentences", corpus.size()},
      {"attention_records", 0},
      {"matched", 0},
      {"evaluated", 0},
      {"excluded_spans", 0},
      {"excluded_special_only", 0},
      {"excluded_alignment", 0},
      {"excluded_degenerate", 0},
      {"excluded_shape", 0},
      {"excluded_duplicate", 0},
      {"unmatched_attention", 0},
  };

  std::vector<GoldSentence> spanned;  // gold with spans, evaluation order
  spanned.reserve(corpus.size());
  std::vector<PreparedSentence> prepared;
  std::vector<std::string> unmatched;
  std::set<std::string> seen;
  HeadGrid grid;
  bool have_grid = false;

  const int workers = worker_count(config);
  // An explicit worker count may exceed the core count; lift TBB's default
  // cap so the request is honoured instead of clamped with a warning.
  tbb::global_control limit(tbb::global_control::max_allowed_parallelism,
                            static_cast<std::size_t>(workers));
  tbb::task_arena arena(workers);

  while (std::optional<AttentionRecord> record = source()) {
    ++counts["attention_records"];
    const auto it = by_id.find(record->sent_id);
    if (it == by_id.end()) {
      unmatched.push_back(record->sent_id);
      continue;
    }
    ++counts["matched"];
    if (!seen.insert(record->sent_id).second) {
      ++counts["excluded_duplicate"];
      warnings.push_back("duplicate attention record for " + record->sent_id);
      continue;
    }

    GoldSentence gold;
    try {
      gold = reconstruct_spans(corpus[it->second]);
    } catch (const AlignmentError& e) {
      ++counts["excluded_spans"];
      warnings.push_back(e.what());
      continue;
    }
    StrippedRecord stripped;
    try {
      stripped = strip_special_tokens(*record, config.renormalize);
    } catch (const DomainError& e) {
      ++counts["excluded_special_only"];
      warnings.push_back(e.what());
      continue;
    }
    AlignedSentence aligned;
    try {
      aligned = align_tokenizations(gold, stripped);
    } catch (const AlignmentError& e) {
      ++counts["excluded_alignment"];
      warnings.push_back(e.what());
      continue;
    }
    if (aligned.size() < 2) {
      ++counts["excluded_degenerate"];
      continue;
    }
    if (!have_grid) {
      grid = HeadGrid(stripped.n_layers, stripped.n_heads);
      have_grid = true;
    } else if (stripped.n_layers != grid.layers() ||
               stripped.n_heads != grid.heads()) {
      ++counts["excluded_shape"];
      warnings.push_back("sentence " + stripped.sent_id + ": " +
                         std::to_string(stripped.n_layers) + "x" +
                         std::to_string(stripped.n_heads) +
                         " heads differ from the first record");
      continue;
    }

    spanned.push_back(std::move(gold));
    PreparedSentence sentence;
    sentence.gold = &spanned.back();
    sentence.arcs = gold_arcs_at_unit_level(spanned.back(), aligned);
    sentence.aligned = std::move(aligned);

    const std::size_t n_heads = stripped.n_heads;
    arena.execute([&] {
      tbb::parallel_for(
          tbb::blocked_range<std::size_t>(0, stripped.n_layers * n_heads),
          [&](const tbb::blocked_range<std::size_t>& range) {
            for (std::size_t lh = range.begin(); lh != range.end(); ++lh) {
              const std::size_t layer = lh / n_heads;
              const std::size_t head = lh % n_heads;
              const UnitAttention unit = merge_attention(
                  stripped.head_matrix(layer, head), sentence.aligned);
              score_head(unit, sentence, methods, config.exclude_intra_unit,
                         layer, head, grid);
            }
          });
    });
    prepared.push_back(std::move(sentence));
  }

  counts["unmatched_attention"] = unmatched.size();
  if (counts["matched"] == 0) {
    throw Error("no attention record matches a treebank sentence");
  }
  if (prepared.empty()) throw Error("no sentence could be evaluated");
  counts["evaluated"] = prepared.size();
  counts["treebank_without_attention"] = corpus.size() - seen.size();
  if (!unmatched.empty()) {
    warnings.push_back(std::to_string(unmatched.size()) +
                       " attention records have no treebank sentence: " +
                       list_ids(unmatched));
  }

  std::vector<const GoldSentence*> golds;
  golds.reserve(prepared.size());
  for (const PreparedSentence& s : prepared) golds.push_back(s.gold);

  AggregationOptions options;
  options.averaging = averaging_of(config);
  options.methods = methods;
  options.relations =
      select_relations(frequencies_of(golds), config.relation_threshold);
  EvalReport report = aggregate_best_heads(grid, options);
  report.exclude_intra_unit = config.exclude_intra_unit;
  report.attention_source =
      config.attention_path
          ? std::filesystem::path(*config.attention_path).filename().string()
          : std::string("stream");

  if (config.positional) {
    const PositionalBaseline baseline = PositionalBaseline::fit(corpus);
    for (BaselineRow& row :
         positional_rows(baseline, golds, options.relations, options.averaging)) {
      report.baselines.push_back(std::move(row));
    }
  }
  if (config.right_branching) {
    for (BaselineRow& row :
         right_branching_prepared(prepared, options.relations,
                                  config.exclude_intra_unit, options.averaging)) {
      report.baselines.push_back(std::move(row));
    }
  }
  report.sentence_counts = std::move(counts);
  report.warnings = std::move(warnings);
  return report;
}

EvalReport evaluate_baselines(const std::vector<GoldSentence>& corpus,
                              const RunConfig& config) {
  std::vector<const GoldSentence*> golds;
  golds.reserve(corpus.size());
  for (const GoldSentence& s : corpus) golds.push_back(&s);

  const Averaging averaging = averaging_of(config);
  const std::vector<std::string> relations =
      select_relations(frequencies_of(golds), config.relation_threshold);

  EvalReport report;
  std::size_t degenerate = 0;
  if (config.random && config.random_layers > 0 && config.random_heads > 0) {
    const std::vector<Method> methods = methods_of(config.method);
    HeadGrid grid(config.random_layers, config.random_heads);
    const int workers = worker_count(config);
    tbb::global_control limit(tbb::global_control::max_allowed_parallelism,
                              static_cast<std::size_t>(workers));
    tbb::task_arena arena(workers);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const GoldSentence& gold = corpus[i];
      if (gold.size() < 2) {
        ++degenerate;
        continue;
      }
      PreparedSentence sentence;
      sentence.gold = &gold;
      sentence.aligned = identity_alignment(gold);
      sentence.arcs = gold_arcs_at_unit_level(gold, sentence.aligned);
      const StrippedRecord random =
          random_attention(gold.size(), config.random_layers,
                           config.random_heads, sentence_seed(config.seed, i));
      const std::size_t n_heads = config.random_heads;
      arena.execute([&] {
        tbb::parallel_for(
            tbb::blocked_range<std::size_t>(0, config.random_layers * n_heads),
            [&](const tbb::blocked_range<std::size_t>& range) {
              for (std::size_t lh = range.begin(); lh != range.end(); ++lh) {
                score_head(random.head_matrix(lh / n_heads, lh % n_heads),
                           sentence, methods, false, lh / n_heads,
                           lh % n_heads, grid);
              }
            });
      });
    }
    AggregationOptions options;
    options.averaging = averaging;
    options.methods = methods;
    options.relations = relations;
    report = aggregate_best_heads(grid, options);
    report.attention_source = "synthetic-random";
  } else {
    report.averaging = averaging;
    report.relations = relations;
  }

  if (config.positional) {
    const PositionalBaseline baseline = PositionalBaseline::fit(corpus);
    for (BaselineRow& row : positional_rows(baseline, golds, relations, averaging)) {
      report.baselines.push_back(std::move(row));
    }
  }
  if (config.right_branching) {
    for (BaselineRow& row : right_branching_rows(golds, relations, averaging)) {
      report.baselines.push_back(std::move(row));
    }
  }
  if (relations.empty()) {
    report.warnings.push_back("no relation occurs in the treebank");
  }
  report.sentence_counts = {{"treebank_sentences", corpus.size()},
                            {"evaluated", corpus.size()},
                            {"excluded_degenerate", degenerate}};
  return report;
}

int cmd_stats(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    std::size_t warnings = 0;
    const std::vector<GoldSentence> corpus = load_treebank(config, err, warnings);
    const auto dir = prepare_output_dir(config);

    const auto histograms = offset_histograms(corpus);
    write_file(dir / "offset_histograms.csv", [&](std::ostream& o) {
      o << "relation,offset,count\n";
      for (const auto& [relation, hist] : histograms) {
        for (const auto& [offset, count] : hist.counts) {
          o << relation << ',' << offset << ',' << count << '\n';
        }
      }
    });

    std::vector<const GoldSentence*> golds;
    for (const GoldSentence& s : corpus) golds.push_back(&s);
    std::vector<std::string> relations =
        select_relations(frequencies_of(golds), config.relation_threshold);
    const PositionalBaseline baseline = PositionalBaseline::fit(corpus);
    const std::vector<BaselineRow> rows =
        positional_rows(baseline, golds, relations, averaging_of(config));
    write_file(dir / "positional_baseline.csv", [&](std::ostream& o) {
      o << "relation,offset,correct,total,accuracy\n";
      for (const BaselineRow& row : rows) {
        o << row.relation << ',' << baseline.offsets.at(row.relation) << ','
          << row.correct << ',' << row.total << ',' << std::fixed
          << std::setprecision(6) << row.accuracy << '\n';
      }
    });

    out << corpus.size() << " sentences\n";
    out << std::left << std::setw(10) << "relation" << std::setw(8) << "offset"
        << std::setw(8) << "arcs" << "accuracy\n";
    for (const BaselineRow& row : rows) {
      out << std::setw(10) << row.relation << std::setw(8)
          << baseline.offsets.at(row.relation) << std::setw(8) << row.total
          << std::fixed << std::setprecision(1) << 100.0 * row.accuracy
          << '\n';
    }
    if (rows.empty()) {
      err << "warning: no relation above threshold\n";
      ++warnings;
    }
    return finish(warnings, config);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

int cmd_baseline(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    std::size_t warnings = 0;
    const std::vector<GoldSentence> corpus = load_treebank(config, err, warnings);
    const auto dir = prepare_output_dir(config);
    const EvalReport report = evaluate_baselines(corpus, config);
    for (const std::string& w : report.warnings) err << "warning: " << w << '\n';
    warnings += report.warnings.size();
    write_report_files(dir, "baseline_report.json", report);
    write_best_head_table(out, report);
    return finish(warnings, config);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

int cmd_evaluate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (!config.attention_path) throw Error("evaluate needs --attention");
    std::size_t warnings = 0;
    const std::vector<GoldSentence> corpus = load_treebank(config, err, warnings);
    if (!std::filesystem::exists(*config.attention_path)) {
      throw Error("attention file '" + *config.attention_path +
                  "' does not exist");
    }
    AttentionFile file(*config.attention_path);
    const auto dir = prepare_output_dir(config);
    const EvalReport report = evaluate_attention(
        corpus, [&] { return file.reader().next(); }, config);
    for (const std::string& w : report.warnings) err << "warning: " << w << '\n';
    warnings += report.warnings.size();
    write_report_files(dir, "report.json", report);
    write_best_head_table(out, report);
    return finish(warnings, config);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

int cmd_export_format_check(const std::string& attention_path, bool strict,
                            std::ostream& out, std::ostream& err) {
  try {
    if (!std::filesystem::exists(attention_path)) {
      throw Error("attention file '" + attention_path + "' does not exist");
    }
    AttentionFile file(attention_path);
    std::size_t records = 0;
    std::size_t warnings = 0;
    std::set<std::string> ids;
    std::optional<std::pair<std::size_t, std::size_t>> shape;
    while (std::optional<AttentionRecord> rec = file.reader().next()) {
      ++records;
      if (!ids.insert(rec->sent_id).second) {
        err << "warning: duplicate sent_id " << rec->sent_id << '\n';
        ++warnings;
      }
      const std::pair<std::size_t, std::size_t> s{rec->n_layers, rec->n_heads};
      if (!shape) {
        shape = s;
      } else if (*shape != s) {
        err << "warning: sentence " << rec->sent_id << " has " << s.first
            << "x" << s.second << " heads, first record has " << shape->first
            << "x" << shape->second << '\n';
        ++warnings;
      }
    }
    out << "ok: " << records << " records";
    if (shape) out << ", " << shape->first << " layers x " << shape->second << " heads";
    out << '\n';
    return warnings > 0 && strict ? kExitWarnings : kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

int cmd_synthesize(const std::string& treebank_path,
                   const std::string& output_path, SynthesisMode mode,
                   std::size_t layers, std::size_t heads, std::uint64_t seed,
                   std::ostream& out, std::ostream& err) {
  try {
    RunConfig config;
    config.treebank_path = treebank_path;
    std::size_t warnings = 0;
    const std::vector<GoldSentence> corpus = load_treebank(config, err, warnings);

    std::vector<GoldSentence> usable;
    for (const GoldSentence& s : corpus) {
      try {
        usable.push_back(reconstruct_spans(s));
      } catch (const AlignmentError& e) {
        err << "warning: " << e.what() << '\n';
      }
    }
    std::ofstream file(output_path, std::ios::binary | std::ios::trunc);
    if (!file) throw Error("cannot write '" + output_path + "'");
    const std::string header =
        encode_attention_header(static_cast<std::uint32_t>(usable.size()));
    file.write(header.data(), static_cast<std::streamsize>(header.size()));
    for (std::size_t i = 0; i < usable.size(); ++i) {
      const std::uint64_t s = sentence_seed(seed, i);
      const AttentionRecord rec =
          mode == SynthesisMode::kGoldTree
              ? gold_tree_record(usable[i], layers, heads, s)
              : random_record(usable[i], layers, heads, s);
      const std::string bytes = encode_attention_record(rec);
      file.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    }
    if (!file) throw Error("write failed for '" + output_path + "'");
    out << "wrote " << usable.size() << " records to " << output_path << '\n';
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace attndep
