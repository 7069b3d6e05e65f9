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

#include "attndep/treebank.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

namespace attndep {
namespace {

constexpr std::size_t kConlluColumns = 10;

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::optional<int> parse_int(std::string_view s) {
  int value = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

std::string line_error(std::size_t line_no, const std::string& what) {
  return "line " + std::to_string(line_no) + ": " + what;
}

// Follows heads from every token; true iff all reach the root without a cycle.
bool heads_form_tree(const std::vector<GoldToken>& tokens) {
  const std::size_t n = tokens.size();
  for (std::size_t i = 0; i < n; ++i) {
    int cur = tokens[i].index;
    std::size_t steps = 0;
    while (cur != 0) {
      if (++steps > n) return false;
      cur = tokens[cur - 1].head;
    }
  }
  return true;
}

struct PendingSentence {
  std::string sent_id;
  std::optional<std::string> text;
  std::vector<GoldToken> tokens;
  std::vector<std::size_t> token_lines;
  bool has_empty_node = false;
  std::size_t first_line = 0;

  bool empty() const {
    return tokens.empty() && !has_empty_node && sent_id.empty() && !text;
  }
};

void warn(ParseDiagnostics* diagnostics, std::string message) {
  if (diagnostics != nullptr) diagnostics->warnings.push_back(std::move(message));
}

void finish_sentence(PendingSentence& pending, std::size_t ordinal,
                     std::vector<GoldSentence>& out,
                     ParseDiagnostics* diagnostics) {
  GoldSentence sentence;
  sentence.sent_id =
      pending.sent_id.empty() ? std::to_string(ordinal) : pending.sent_id;
  const std::string where = "sentence " + sentence.sent_id + " (line " +
                            std::to_string(pending.first_line) + ")";

  if (pending.has_empty_node) {
    if (diagnostics != nullptr) ++diagnostics->dropped_empty_nodes;
    warn(diagnostics, where + ": contains empty nodes, skipped");
    return;
  }
  if (pending.tokens.empty()) return;

  const int n = static_cast<int>(pending.tokens.size());
  int roots = 0;
  int root_index = 0;
  for (std::size_t i = 0; i < pending.tokens.size(); ++i) {
    const GoldToken& tok = pending.tokens[i];
    if (tok.head < 0 || tok.head > n) {
      throw ParseError(line_error(
          pending.token_lines[i],
          "head " + std::to_string(tok.head) + " out of range [0, " +
              std::to_string(n) + "]"));
    }
    if (tok.head == 0) {
      ++roots;
      root_index = tok.index;
    }
  }
  if (roots != 1) {
    if (diagnostics != nullptr) ++diagnostics->dropped_bad_root;
    warn(diagnostics, where + ": " + std::to_string(roots) +
                          " root tokens, skipped");
    return;
  }
  for (const GoldToken& tok : pending.tokens) {
    if (tok.head == tok.index) {
      if (diagnostics != nullptr) ++diagnostics->dropped_not_tree;
      warn(diagnostics, where + ": token " + std::to_string(tok.index) +
                            " is its own head, skipped");
      return;
    }
  }
  if (!heads_form_tree(pending.tokens)) {
    if (diagnostics != nullptr) ++diagnostics->dropped_not_tree;
    warn(diagnostics, where + ": heads contain a cycle, skipped");
    return;
  }

  if (pending.text) {
    sentence.text = *pending.text;
  } else {
    for (const GoldToken& tok : pending.tokens) {
      if (!sentence.text.empty()) sentence.text.push_back(' ');
      sentence.text += tok.form;
    }
  }
  sentence.tokens = std::move(pending.tokens);
  sentence.root_index = root_index;
  out.push_back(std::move(sentence));
}

}  // namespace

bool GoldSentence::has_spans() const {
  for (const GoldToken& tok : tokens) {
    if (!tok.span) return false;
  }
  return true;
}

std::string universal_relation(const std::string& deprel) {
  const std::size_t colon = deprel.find(':');
  return colon == std::string::npos ? deprel : deprel.substr(0, colon);
}

std::vector<GoldSentence> parse_conllu(std::istream& input,
                                       ParseDiagnostics* diagnostics) {
  std::vector<GoldSentence> sentences;
  PendingSentence pending;
  std::size_t ordinal = 0;
  std::size_t line_no = 0;
  std::string line;

  const auto flush = [&] {
    if (pending.empty()) return;
    ++ordinal;
    finish_sentence(pending, ordinal, sentences, diagnostics);
    pending = PendingSentence{};
  };

  while (std::getline(input, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) {
      flush();
      continue;
    }
    if (pending.empty()) pending.first_line = line_no;

    if (line.front() == '#') {
      std::string_view body = trim(std::string_view(line).substr(1));
      const std::size_t eq = body.find('=');
      if (eq == std::string_view::npos) continue;
      const std::string_view key = trim(body.substr(0, eq));
      const std::string_view value = trim(body.substr(eq + 1));
      if (key == "sent_id") {
        pending.sent_id = std::string(value);
      } else if (key == "text") {
        pending.text = std::string(value);
      }
      continue;
    }

    const std::vector<std::string_view> fields = split_tabs(line);
    if (fields.size() != kConlluColumns) {
      throw ParseError(line_error(
          line_no, "expected 10 tab-separated columns, found " +
                       std::to_string(fields.size())));
    }
    const std::string_view id = fields[0];
    if (id.find('-') != std::string_view::npos) continue;  // multiword range
    if (id.find('.') != std::string_view::npos) {
      pending.has_empty_node = true;
      continue;
    }
    const std::optional<int> index = parse_int(id);
    if (!index || *index != static_cast<int>(pending.tokens.size()) + 1) {
      throw ParseError(line_error(line_no, "unexpected token id '" +
                                               std::string(id) + "'"));
    }
    const std::optional<int> head = parse_int(fields[6]);
    if (!head) {
      throw ParseError(line_error(line_no, "head '" + std::string(fields[6]) +
                                               "' is not an integer"));
    }
    if (*head < 0) {
      throw ParseError(line_error(line_no, "head " + std::to_string(*head) +
                                               " out of range"));
    }
    std::string deprel = universal_relation(std::string(fields[7]));
    if (deprel.empty() || deprel == "_") {
      throw ParseError(line_error(line_no, "empty deprel"));
    }

    GoldToken tok;
    tok.index = *index;
    tok.form = std::string(fields[1]);
    tok.head = *head;
    tok.deprel = std::move(deprel);
    pending.tokens.push_back(std::move(tok));
    pending.token_lines.push_back(line_no);
  }
  flush();
  return sentences;
}

std::vector<GoldSentence> read_conllu_file(const std::string& path,
                                           ParseDiagnostics* diagnostics) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open treebank '" + path + "'");
  return parse_conllu(in, diagnostics);
}

void write_token_table(std::ostream& out, const GoldSentence& sentence) {
  out << "# sent_id = " << sentence.sent_id << '\n';
  out << "# text = " << sentence.text << '\n';
  for (const GoldToken& tok : sentence.tokens) {
    out << tok.index << '\t' << tok.form << "\t_\t_\t_\t_\t" << tok.head
        << '\t' << tok.deprel << "\t_\t_\n";
  }
  out << '\n';
}

GoldSentence reconstruct_spans(const GoldSentence& sentence) {
  const std::string& text = sentence.text;

  // Byte offset -> code point offset.
  std::vector<std::uint32_t> cp_at(text.size() + 1, 0);
  std::uint32_t cp = 0;
  for (std::size_t b = 0; b < text.size(); ++b) {
    // continuation bytes share the offset of their lead byte
    const bool lead = (static_cast<unsigned char>(text[b]) & 0xC0) != 0x80;
    cp_at[b] = lead ? cp++ : (cp == 0 ? 0 : cp - 1);
  }
  cp_at[text.size()] = cp;

  GoldSentence out = sentence;
  std::size_t cursor = 0;
  for (GoldToken& tok : out.tokens) {
    std::size_t pos = cursor;
    while (pos < text.size() &&
           (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\n' ||
            text[pos] == '\r')) {
      ++pos;
    }
    if (tok.form.empty() || text.compare(pos, tok.form.size(), tok.form) != 0) {
      pos = tok.form.empty() ? std::string::npos : text.find(tok.form, cursor);
    }
    if (pos == std::string::npos) {
      throw AlignmentError("sentence " + sentence.sent_id + ": form '" +
                           tok.form + "' of token " +
                           std::to_string(tok.index) +
                           " not found in text at or after offset " +
                           std::to_string(cp_at[cursor]));
    }
    const std::size_t end = pos + tok.form.size();
    tok.span = CharSpan{cp_at[pos], cp_at[end]};
    cursor = end;
  }
  return out;
}

std::size_t OffsetHistogram::total() const {
  std::size_t sum = 0;
  for (const auto& [offset, count] : counts) sum += count;
  return sum;
}

OffsetHistogram offset_histogram(const std::vector<GoldSentence>& corpus,
                                 const std::string& relation) {
  OffsetHistogram hist;
  hist.relation = relation;
  for (const GoldSentence& sentence : corpus) {
    for (const GoldToken& tok : sentence.tokens) {
      if (tok.head == 0 || tok.deprel != relation) continue;
      ++hist.counts[tok.head - tok.index];
    }
  }
  if (hist.counts.empty()) {
    throw DomainError("relation '" + relation + "' does not occur in corpus");
  }
  return hist;
}

std::map<std::string, OffsetHistogram> offset_histograms(
    const std::vector<GoldSentence>& corpus) {
  std::map<std::string, OffsetHistogram> out;
  for (const GoldSentence& sentence : corpus) {
    for (const GoldToken& tok : sentence.tokens) {
      if (tok.head == 0) continue;
      OffsetHistogram& hist = out[tok.deprel];
      hist.relation = tok.deprel;
      ++hist.counts[tok.head - tok.index];
    }
  }
  return out;
}

int most_common_offset(const OffsetHistogram& histogram) {
  if (histogram.counts.empty()) {
    throw DomainError("empty offset histogram for '" + histogram.relation + "'");
  }
  int best = 0;
  std::size_t best_count = 0;
  bool first = true;
  for (const auto& [offset, count] : histogram.counts) {
    const auto better = [&] {
      if (count != best_count) return count > best_count;
      if (std::abs(offset) != std::abs(best)) {
        return std::abs(offset) < std::abs(best);
      }
      return offset < best;
    };
    if (first || better()) {
      best = offset;
      best_count = count;
      first = false;
    }
  }
  return best;
}

std::map<std::string, std::size_t> relation_frequencies(
    const std::vector<GoldSentence>& corpus) {
  std::map<std::string, std::size_t> freq;
  for (const GoldSentence& sentence : corpus) {
    for (const GoldToken& tok : sentence.tokens) {
      if (tok.head != 0) ++freq[tok.deprel];
    }
  }
  return freq;
}

}  // namespace attndep
