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

#include "attndep/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <set>

#include <nlohmann/json.hpp>

namespace attndep {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

const char* averaging_name(Averaging a) {
  return a == Averaging::kMicro ? "micro" : "macro";
}

const BaselineRow* find_baseline(const EvalReport& report,
                                 const std::string& baseline,
                                 const std::string& relation) {
  for (const BaselineRow& row : report.baselines) {
    if (row.baseline == baseline && row.relation == relation) return &row;
  }
  return nullptr;
}

}  // namespace

UnitGoldArcs gold_arcs_at_unit_level(const GoldSentence& gold,
                                     const AlignedSentence& aligned) {
  UnitGoldArcs out;
  for (const GoldToken& tok : gold.tokens) {
    if (tok.head == 0) continue;
    const std::size_t dep_pos = static_cast<std::size_t>(tok.index - 1);
    const std::size_t head_pos = static_cast<std::size_t>(tok.head - 1);
    const std::size_t dep_unit = aligned.gold_to_unit[dep_pos];
    const std::size_t head_unit = aligned.gold_to_unit[head_pos];
    if (dep_unit != head_unit) {
      out.inter.push_back({dep_unit, head_unit, tok.deprel});
    } else {
      const bool first = head_pos == aligned.units[dep_unit].gold.begin;
      out.intra.push_back({tok.deprel, first});
    }
  }
  return out;
}

std::map<std::string, Count> score_max_method(
    const ArcSet& arcs, const std::vector<UnitGoldArc>& gold) {
  const std::set<UndirectedPair> predicted = arcs.undirected_view();
  std::map<std::string, Count> counts;
  for (const UnitGoldArc& arc : gold) {
    Count& c = counts[arc.relation];
    ++c.total;
    if (predicted.count(undirected(arc.dependent, arc.head))) ++c.correct;
  }
  return counts;
}

Count score_uuas(const DepTree& tree, const std::vector<UnitGoldArc>& gold) {
  const std::set<UndirectedPair> predicted = tree.undirected_view();
  Count c;
  for (const UnitGoldArc& arc : gold) {
    ++c.total;
    if (predicted.count(undirected(arc.dependent, arc.head))) ++c.correct;
  }
  return c;
}

std::map<std::string, Count> score_tree_by_relation(
    const DepTree& tree, const std::vector<UnitGoldArc>& gold) {
  const std::set<UndirectedPair> predicted = tree.undirected_view();
  std::map<std::string, Count> counts;
  for (const UnitGoldArc& arc : gold) {
    Count& c = counts[arc.relation];
    ++c.total;
    if (predicted.count(undirected(arc.dependent, arc.head))) ++c.correct;
  }
  return counts;
}

void add_intra_unit(std::map<std::string, Count>& counts,
                    const std::vector<IntraUnitArc>& intra) {
  for (const IntraUnitArc& arc : intra) {
    Count& c = counts[arc.relation];
    ++c.total;
    if (arc.correct) ++c.correct;
  }
}

void add_all_row(std::map<std::string, Count>& counts) {
  Count all;
  for (const auto& [relation, c] : counts) {
    if (relation != kAllRelations) all += c;
  }
  counts[kAllRelations] = all;
}

void Tally::add_sentence(const Count& count) {
  correct += count.correct;
  total += count.total;
  if (count.total > 0) {
    ratio_sum += static_cast<double>(count.correct) /
                 static_cast<double>(count.total);
    ++sentences;
  }
}

void Tally::merge(const Tally& other) {
  correct += other.correct;
  total += other.total;
  ratio_sum += other.ratio_sum;
  sentences += other.sentences;
}

double Tally::accuracy(Averaging averaging) const {
  if (averaging == Averaging::kMacro) {
    return sentences == 0 ? 0.0 : ratio_sum / static_cast<double>(sentences);
  }
  return total == 0 ? 0.0
                    : static_cast<double>(correct) / static_cast<double>(total);
}

const char* method_name(Method method) {
  return method == Method::kMax ? "max" : "mst";
}

HeadGrid::HeadGrid(std::size_t layers, std::size_t heads)
    : layers_(layers),
      heads_(heads),
      max_(layers * heads),
      mst_(layers * heads) {}

RelationTallies& HeadGrid::at(Method method, std::size_t layer,
                              std::size_t head) {
  auto& cells = method == Method::kMax ? max_ : mst_;
  return cells[layer * heads_ + head];
}

const RelationTallies& HeadGrid::at(Method method, std::size_t layer,
                                    std::size_t head) const {
  const auto& cells = method == Method::kMax ? max_ : mst_;
  return cells[layer * heads_ + head];
}

void HeadGrid::add_sentence(Method method, std::size_t layer, std::size_t head,
                            const std::map<std::string, Count>& counts) {
  RelationTallies& cell = at(method, layer, head);
  for (const auto& [relation, count] : counts) cell[relation].add_sentence(count);
}

const std::vector<std::string>& table_relations() {
  static const std::vector<std::string> kRelations = {
      "nsubj", "obj",   "advmod", "amod", "case", "det",   "obl", "nmod",
      "punct", "aux",   "conj",   "cc",   "mark", "advcl", "csubj"};
  return kRelations;
}

std::vector<std::string> select_relations(
    const std::map<std::string, std::size_t>& frequencies,
    std::size_t threshold) {
  const auto occurs = [&](const std::string& r) {
    const auto it = frequencies.find(r);
    return it != frequencies.end() && it->second > 0;
  };
  std::vector<std::string> out;
  for (const std::string& r : table_relations()) {
    if (occurs(r)) out.push_back(r);
  }
  for (const auto& [relation, count] : frequencies) {
    if (count > threshold &&
        std::find(out.begin(), out.end(), relation) == out.end()) {
      out.push_back(relation);
    }
  }
  return out;
}

EvalReport aggregate_best_heads(const HeadGrid& grid,
                                const AggregationOptions& options) {
  if (grid.layers() == 0 || grid.heads() == 0) {
    throw DomainError("no per-head tallies to aggregate");
  }
  EvalReport report;
  report.averaging = options.averaging;
  report.layers = grid.layers();
  report.heads = grid.heads();
  report.relations = options.relations;

  std::vector<std::string> rows = options.relations;
  rows.push_back(kAllRelations);

  for (Method method : options.methods) {
    const std::string name = method_name(method);
    report.methods.push_back(name);
    auto& best = report.best_per_relation[name];
    for (std::size_t l = 0; l < grid.layers(); ++l) {
      for (std::size_t h = 0; h < grid.heads(); ++h) {
        const RelationTallies& cell = grid.at(method, l, h);
        for (const std::string& relation : rows) {
          const auto it = cell.find(relation);
          if (it == cell.end() || it->second.total == 0) continue;
          const Tally& t = it->second;
          const double acc = t.accuracy(options.averaging);
          report.per_head_scores.push_back(
              {method, l, h, relation, t.correct, t.total, acc});
          const auto b = best.find(relation);
          if (b == best.end() || acc > b->second.accuracy) {
            best[relation] = {l, h, acc, t.correct, t.total};
          }
          if (method == Method::kMst && relation == kAllRelations) {
            report.uuas_per_head[{l, h}] = acc;
            auto layer_best = report.max_uuas_per_layer.find(l);
            if (layer_best == report.max_uuas_per_layer.end() ||
                acc > layer_best->second) {
              report.max_uuas_per_layer[l] = acc;
            }
          }
        }
      }
    }
  }
  return report;
}

void write_report_json(std::ostream& out, const EvalReport& report) {
  ordered_json j;
  j["attention_source"] = report.attention_source;
  j["averaging"] = averaging_name(report.averaging);
  j["exclude_intra_unit"] = report.exclude_intra_unit;
  j["methods"] = report.methods;
  j["layers"] = report.layers;
  j["heads"] = report.heads;
  j["relations"] = report.relations;

  ordered_json counts = ordered_json::object();
  for (const auto& [key, value] : report.sentence_counts) counts[key] = value;
  j["sentence_counts"] = counts;

  ordered_json best = ordered_json::object();
  for (const auto& [method, by_relation] : report.best_per_relation) {
    ordered_json m = ordered_json::object();
    for (const auto& [relation, b] : by_relation) {
      m[relation] = {{"layer", b.layer},
                     {"head", b.head},
                     {"accuracy", b.accuracy},
                     {"correct", b.correct},
                     {"total", b.total}};
    }
    best[method] = m;
  }
  j["best_per_relation"] = best;

  ordered_json layers = ordered_json::array();
  for (const auto& [layer, uuas] : report.max_uuas_per_layer) {
    layers.push_back({{"layer", layer}, {"uuas", uuas}});
  }
  j["max_uuas_per_layer"] = layers;

  ordered_json per_head_uuas = ordered_json::array();
  for (const auto& [lh, uuas] : report.uuas_per_head) {
    per_head_uuas.push_back(
        {{"layer", lh.first}, {"head", lh.second}, {"uuas", uuas}});
  }
  j["uuas_per_head"] = per_head_uuas;

  ordered_json baselines = ordered_json::array();
  for (const BaselineRow& row : report.baselines) {
    baselines.push_back({{"baseline", row.baseline},
                         {"relation", row.relation},
                         {"correct", row.correct},
                         {"total", row.total},
                         {"accuracy", row.accuracy}});
  }
  j["baselines"] = baselines;

  ordered_json scores = ordered_json::array();
  for (const HeadScore& s : report.per_head_scores) {
    scores.push_back({{"method", method_name(s.method)},
                      {"layer", s.layer},
                      {"head", s.head},
                      {"relation", s.relation},
                      {"correct", s.correct},
                      {"total", s.total},
                      {"accuracy", s.accuracy}});
  }
  j["per_head_scores"] = scores;
  j["warnings"] = report.warnings;

  out << j.dump(2) << '\n';
}

void write_per_head_csv(std::ostream& out, const EvalReport& report) {
  out << "method,layer,head,relation,correct,total,accuracy\n";
  for (const HeadScore& s : report.per_head_scores) {
    out << method_name(s.method) << ',' << s.layer << ',' << s.head << ','
        << s.relation << ',' << s.correct << ',' << s.total << ','
        << fixed6(s.accuracy) << '\n';
  }
}

void write_accuracy_by_type_csv(std::ostream& out, const EvalReport& report) {
  out << "method,relation,best_layer,best_head,accuracy,positional,"
         "right_branching\n";
  std::vector<std::string> rows = report.relations;
  rows.push_back(kAllRelations);
  for (const std::string& method : report.methods) {
    const auto by_method = report.best_per_relation.find(method);
    for (const std::string& relation : rows) {
      if (by_method == report.best_per_relation.end()) break;
      const auto b = by_method->second.find(relation);
      if (b == by_method->second.end()) continue;
      const BaselineRow* pos = find_baseline(report, "positional", relation);
      const BaselineRow* rb = find_baseline(report, "right-branching", relation);
      out << method << ',' << relation << ',' << b->second.layer << ','
          << b->second.head << ',' << fixed6(b->second.accuracy) << ','
          << (pos ? fixed6(pos->accuracy) : "") << ','
          << (rb ? fixed6(rb->accuracy) : "") << '\n';
    }
  }
}

void write_uuas_by_layer_csv(std::ostream& out, const EvalReport& report) {
  out << "layer,max_uuas,right_branching_uuas\n";
  const BaselineRow* rb =
      find_baseline(report, "right-branching", kAllRelations);
  for (const auto& [layer, uuas] : report.max_uuas_per_layer) {
    out << layer << ',' << fixed6(uuas) << ','
        << (rb ? fixed6(rb->accuracy) : "") << '\n';
  }
}

void write_best_head_table(std::ostream& out, const EvalReport& report) {
  std::vector<std::string> rows = report.relations;
  rows.push_back(kAllRelations);
  out << std::left << std::setw(10) << "relation";
  for (const std::string& method : report.methods) {
    out << std::setw(20) << (method + " (L,H) acc");
  }
  out << std::setw(12) << "positional" << std::setw(12) << "right-branch"
      << '\n';
  const auto pct = [](double v) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.1f", 100.0 * v);
    return std::string(buf);
  };
  for (const std::string& relation : rows) {
    out << std::setw(10) << relation;
    for (const std::string& method : report.methods) {
      std::string cell = "-";
      const auto m = report.best_per_relation.find(method);
      if (m != report.best_per_relation.end()) {
        const auto b = m->second.find(relation);
        if (b != m->second.end()) {
          cell = "(" + std::to_string(b->second.layer) + "," +
                 std::to_string(b->second.head) + ") " +
                 pct(b->second.accuracy);
        }
      }
      out << std::setw(20) << cell;
    }
    const BaselineRow* pos = find_baseline(report, "positional", relation);
    const BaselineRow* rb = find_baseline(report, "right-branching", relation);
    out << std::setw(12) << (pos ? pct(pos->accuracy) : "-") << std::setw(12)
        << (rb ? pct(rb->accuracy) : "-") << '\n';
  }
}

}  // namespace attndep
