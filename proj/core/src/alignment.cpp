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

#include "attndep/alignment.hpp"

#include <algorithm>

namespace attndep {

std::vector<SpanGroup> align_spans(std::span<const CharSpan> left,
                                   std::span<const CharSpan> right) {
  std::vector<SpanGroup> groups;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < left.size() && j < right.size()) {
    SpanGroup group{{i, i + 1}, {j, j + 1}};
    std::uint32_t left_end = left[i].end;
    std::uint32_t right_end = right[j].end;
    ++i;
    ++j;
    while (left_end != right_end) {
      if (left_end < right_end) {
        if (i == left.size()) break;
        left_end = left[i++].end;
        group.left.end = i;
      } else {
        if (j == right.size()) break;
        right_end = right[j++].end;
        group.right.end = j;
      }
    }
    if (left_end != right_end) {
      throw AlignmentError("token boundaries never coincide after offset " +
                           std::to_string(std::min(left_end, right_end)));
    }
    groups.push_back(group);
  }
  if (i != left.size() || j != right.size()) {
    throw AlignmentError("one tokenization has trailing tokens");
  }
  return groups;
}

std::vector<std::size_t> AlignedSentence::model_to_unit() const {
  std::size_t n = units.empty() ? 0 : units.back().model.end;
  std::vector<std::size_t> out(n);
  for (std::size_t u = 0; u < units.size(); ++u) {
    for (std::size_t m = units[u].model.begin; m < units[u].model.end; ++m) {
      out[m] = u;
    }
  }
  return out;
}

namespace {

AlignedSentence build_aligned(const GoldSentence& gold,
                              const std::vector<SpanGroup>& groups) {
  AlignedSentence out;
  out.sent_id = gold.sent_id;
  out.gold_to_unit.resize(gold.size());
  out.units.reserve(groups.size());
  for (std::size_t u = 0; u < groups.size(); ++u) {
    const SpanGroup& g = groups[u];
    AlignedUnit unit;
    unit.gold = g.left;
    unit.model = g.right;
    unit.span = CharSpan{gold.tokens[g.left.begin].span->begin,
                         gold.tokens[g.left.end - 1].span->end};
    for (std::size_t k = g.left.begin; k < g.left.end; ++k) {
      out.gold_to_unit[k] = u;
    }
    out.units.push_back(unit);
  }
  out.root_unit = out.gold_to_unit[gold.root_index - 1];
  return out;
}

}  // namespace

AlignedSentence align_tokenizations(const GoldSentence& gold,
                                    const StrippedRecord& record) {
  if (!gold.has_spans()) {
    throw AlignmentError("sentence " + gold.sent_id + ": gold spans missing");
  }
  std::vector<CharSpan> gold_spans;
  gold_spans.reserve(gold.size());
  for (const GoldToken& tok : gold.tokens) gold_spans.push_back(*tok.span);
  std::vector<CharSpan> model_spans;
  model_spans.reserve(record.n_tokens());
  for (const ModelToken& tok : record.model_tokens) {
    model_spans.push_back(tok.span);
  }
  try {
    return build_aligned(gold, align_spans(gold_spans, model_spans));
  } catch (const AlignmentError& e) {
    throw AlignmentError("sentence " + gold.sent_id + ": " + e.what());
  }
}

AlignedSentence identity_alignment(const GoldSentence& gold) {
  AlignedSentence out;
  out.sent_id = gold.sent_id;
  out.units.reserve(gold.size());
  out.gold_to_unit.resize(gold.size());
  for (std::size_t k = 0; k < gold.size(); ++k) {
    AlignedUnit unit;
    unit.gold = {k, k + 1};
    unit.model = {k, k + 1};
    if (gold.tokens[k].span) unit.span = *gold.tokens[k].span;
    out.units.push_back(unit);
    out.gold_to_unit[k] = k;
  }
  out.root_unit = static_cast<std::size_t>(gold.root_index - 1);
  return out;
}

SquareMatrix merge_attention_unnormalized(const SquareMatrix& matrix,
                                          const AlignedSentence& aligned) {
  const std::vector<std::size_t> unit_of = aligned.model_to_unit();
  if (matrix.size() != unit_of.size()) {
    throw DomainError("sentence " + aligned.sent_id + ": matrix has " +
                      std::to_string(matrix.size()) +
                      " rows but alignment covers " +
                      std::to_string(unit_of.size()) + " model tokens");
  }
  const std::size_t t = matrix.size();
  const std::size_t u = aligned.size();

  // Column sums first, then row sums.
  std::vector<double> by_column(t * u, 0.0);
  for (std::size_t r = 0; r < t; ++r) {
    const double* src = matrix.row(r);
    double* dst = by_column.data() + r * u;
    for (std::size_t c = 0; c < t; ++c) dst[unit_of[c]] += src[c];
  }
  SquareMatrix merged(u);
  for (std::size_t r = 0; r < t; ++r) {
    double* dst = merged.row(unit_of[r]);
    const double* src = by_column.data() + r * u;
    for (std::size_t c = 0; c < u; ++c) dst[c] += src[c];
  }
  return merged;
}

UnitAttention merge_attention(const SquareMatrix& matrix,
                              const AlignedSentence& aligned) {
  SquareMatrix merged = merge_attention_unnormalized(matrix, aligned);
  merged.normalize_rows();
  return merged;
}

}  // namespace attndep
