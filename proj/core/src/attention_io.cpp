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

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace attndep {
namespace {

constexpr std::uint32_t kMaxStringBytes = 1u << 24;

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) {
    out.push_back(static_cast<char>((v >> shift) & 0xFF));
  }
}

void put_string(std::string& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out += s;
}

void put_f32(std::string& out, float f) {
  std::uint32_t bits = 0;
  static_assert(sizeof(bits) == sizeof(f));
  std::memcpy(&bits, &f, sizeof(bits));
  put_u32(out, bits);
}

std::string row_location(const std::string& sent_id, std::size_t layer,
                         std::size_t head, std::size_t row) {
  return "sentence " + sent_id + " layer " + std::to_string(layer) + " head " +
         std::to_string(head) + " row " + std::to_string(row);
}

template <typename Weight>
void renormalize_block(Weight* block, std::size_t n) {
  for (std::size_t r = 0; r < n; ++r) {
    Weight* row = block + r * n;
    double sum = 0.0;
    for (std::size_t c = 0; c < n; ++c) sum += row[c];
    if (sum <= 0.0 || std::abs(sum - 1.0) <= 1e-12) continue;
    for (std::size_t c = 0; c < n; ++c) {
      row[c] = static_cast<Weight>(static_cast<double>(row[c]) / sum);
    }
  }
}

template <typename Record>
StrippedRecord strip_impl(const Record& record, bool renormalize) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < record.model_tokens.size(); ++i) {
    if (!record.model_tokens[i].is_special) keep.push_back(i);
  }
  if (keep.empty()) {
    throw DomainError("sentence " + record.sent_id +
                      ": every model token is special");
  }

  const std::size_t t = record.model_tokens.size();
  const std::size_t k = keep.size();
  StrippedRecord out;
  out.sent_id = record.sent_id;
  out.n_layers = record.n_layers;
  out.n_heads = record.n_heads;
  out.model_tokens.reserve(k);
  for (std::size_t i : keep) out.model_tokens.push_back(record.model_tokens[i]);
  out.weights.resize(out.n_layers * out.n_heads * k * k);

  for (std::size_t lh = 0; lh < out.n_layers * out.n_heads; ++lh) {
    const auto* src = record.weights.data() + lh * t * t;
    double* dst = out.weights.data() + lh * k * k;
    for (std::size_t r = 0; r < k; ++r) {
      for (std::size_t c = 0; c < k; ++c) {
        dst[r * k + c] = static_cast<double>(src[keep[r] * t + keep[c]]);
      }
    }
    if (renormalize) renormalize_block(dst, k);
  }
  return out;
}

}  // namespace

float AttentionRecord::weight(std::size_t layer, std::size_t head,
                              std::size_t from, std::size_t to) const {
  const std::size_t t = n_tokens();
  return weights[((layer * n_heads + head) * t + from) * t + to];
}

SquareMatrix StrippedRecord::head_matrix(std::size_t layer,
                                         std::size_t head) const {
  const std::size_t t = n_tokens();
  SquareMatrix m(t);
  const double* src = weights.data() + (layer * n_heads + head) * t * t;
  std::memcpy(m.row(0), src, t * t * sizeof(double));
  return m;
}

void validate_record(const AttentionRecord& record, double row_tolerance) {
  const std::string& id = record.sent_id;
  const std::size_t t = record.n_tokens();
  if (record.n_layers == 0 || record.n_heads == 0) {
    throw ValidationError("sentence " + id + ": zero layers or heads");
  }
  if (t == 0) throw ValidationError("sentence " + id + ": no tokens");
  if (t > std::numeric_limits<std::uint16_t>::max()) {
    throw ValidationError("sentence " + id + ": too many tokens");
  }
  const std::size_t expected =
      std::size_t{record.n_layers} * record.n_heads * t * t;
  if (record.weights.size() != expected) {
    throw ValidationError("sentence " + id + ": expected " +
                          std::to_string(expected) + " weights, found " +
                          std::to_string(record.weights.size()));
  }
  for (std::size_t i = 0; i < t; ++i) {
    const ModelToken& tok = record.model_tokens[i];
    if (tok.is_special && !tok.span.empty()) {
      throw ValidationError("sentence " + id + ": special token " +
                            std::to_string(i) + " has a non-empty span");
    }
    if (tok.span.end < tok.span.begin) {
      throw ValidationError("sentence " + id + ": token " + std::to_string(i) +
                            " has an inverted span");
    }
  }
  for (std::size_t l = 0; l < record.n_layers; ++l) {
    for (std::size_t h = 0; h < record.n_heads; ++h) {
      for (std::size_t r = 0; r < t; ++r) {
        double sum = 0.0;
        for (std::size_t c = 0; c < t; ++c) {
          const float w = record.weight(l, h, r, c);
          if (!std::isfinite(w) || w < 0.0f || w > 1.0f) {
            throw ValidationError(row_location(id, l, h, r) + ": weight " +
                                  std::to_string(w) + " outside [0, 1]");
          }
          sum += w;
        }
        if (std::abs(sum - 1.0) > row_tolerance) {
          throw ValidationError(row_location(id, l, h, r) + ": row sums to " +
                                std::to_string(sum));
        }
      }
    }
  }
}

AttentionReader::AttentionReader(std::istream& input, bool validate)
    : in_(input), validate_(validate) {
  char magic[4];
  read_exact(magic, sizeof(magic), "magic");
  if (std::memcmp(magic, kAtnwMagic, sizeof(magic)) != 0) {
    throw FormatError("bad magic '" + std::string(magic, 4) +
                      "', expected 'ATNW'");
  }
  const std::uint32_t version = read_u32("version");
  if (version != kAtnwVersion) {
    throw FormatError("unsupported ATNW version " + std::to_string(version));
  }
  n_sentences_ = read_u32("sentence count");
}

void AttentionReader::read_exact(void* dst, std::size_t n, const char* what) {
  if (n == 0) return;
  in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
  const auto got = static_cast<std::size_t>(in_.gcount());
  if (got != n) {
    throw FormatError("truncated payload at byte offset " +
                      std::to_string(offset_ + got) + " while reading " + what);
  }
  offset_ += n;
}

std::uint32_t AttentionReader::read_u32(const char* what) {
  unsigned char b[4];
  read_exact(b, 4, what);
  return std::uint32_t{b[0]} | (std::uint32_t{b[1]} << 8) |
         (std::uint32_t{b[2]} << 16) | (std::uint32_t{b[3]} << 24);
}

std::uint16_t AttentionReader::read_u16(const char* what) {
  unsigned char b[2];
  read_exact(b, 2, what);
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

std::string AttentionReader::read_string(const char* what) {
  const std::uint32_t len = read_u32(what);
  if (len > kMaxStringBytes) {
    throw FormatError("implausible string length " + std::to_string(len) +
                      " at byte offset " + std::to_string(offset_ - 4) +
                      " while reading " + what);
  }
  std::string s(len, '\0');
  read_exact(s.data(), len, what);
  return s;
}

std::optional<AttentionRecord> AttentionReader::next() {
  if (consumed_ == n_sentences_) return std::nullopt;
  AttentionRecord rec;
  rec.sent_id = read_string("sent_id");
  rec.n_layers = read_u16("n_layers");
  rec.n_heads = read_u16("n_heads");
  const std::uint16_t n_tokens = read_u16("n_tokens");
  rec.model_tokens.resize(n_tokens);
  for (ModelToken& tok : rec.model_tokens) {
    tok.surface = read_string("token surface");
    tok.span.begin = read_u32("span_start");
    tok.span.end = read_u32("span_end");
    unsigned char special = 0;
    read_exact(&special, 1, "is_special");
    tok.is_special = special != 0;
  }
  const std::size_t count =
      std::size_t{rec.n_layers} * rec.n_heads * n_tokens * n_tokens;
  // Chunked so a corrupt count fails on truncation before allocating it all.
  constexpr std::size_t kChunk = 1 << 16;
  std::vector<unsigned char> raw;
  while (rec.weights.size() < count) {
    const std::size_t n = std::min(kChunk, count - rec.weights.size());
    raw.resize(n * 4);
    read_exact(raw.data(), raw.size(), "weights");
    for (std::size_t i = 0; i < n; ++i) {
      const unsigned char* b = raw.data() + 4 * i;
      const std::uint32_t bits = std::uint32_t{b[0]} |
                                 (std::uint32_t{b[1]} << 8) |
                                 (std::uint32_t{b[2]} << 16) |
                                 (std::uint32_t{b[3]} << 24);
      float w;
      std::memcpy(&w, &bits, 4);
      rec.weights.push_back(w);
    }
  }
  ++consumed_;
  if (validate_) validate_record(rec);
  return rec;
}

AttentionFile::AttentionFile(const std::string& path, bool validate)
    : stream_(path, std::ios::binary) {
  if (!stream_) throw Error("cannot open attention file '" + path + "'");
  reader_.emplace(stream_, validate);
}

std::vector<AttentionRecord> read_attention_file(std::istream& input,
                                                 bool validate) {
  AttentionReader reader(input, validate);
  std::vector<AttentionRecord> records;
  records.reserve(reader.sentence_count());
  while (auto rec = reader.next()) records.push_back(std::move(*rec));
  return records;
}

std::vector<AttentionRecord> read_attention_file(const std::string& path,
                                                 bool validate) {
  AttentionFile file(path, validate);
  std::vector<AttentionRecord> records;
  while (auto rec = file.reader().next()) records.push_back(std::move(*rec));
  return records;
}

std::string encode_attention_header(std::uint32_t n_sentences) {
  std::string out(kAtnwMagic, sizeof(kAtnwMagic));
  put_u32(out, kAtnwVersion);
  put_u32(out, n_sentences);
  return out;
}

std::string encode_attention_record(const AttentionRecord& rec) {
  validate_record(rec);
  std::string out;
  out.reserve(16 + rec.weights.size() * 4);
  put_string(out, rec.sent_id);
  put_u16(out, rec.n_layers);
  put_u16(out, rec.n_heads);
  put_u16(out, static_cast<std::uint16_t>(rec.n_tokens()));
  for (const ModelToken& tok : rec.model_tokens) {
    put_string(out, tok.surface);
    put_u32(out, tok.span.begin);
    put_u32(out, tok.span.end);
    out.push_back(tok.is_special ? 1 : 0);
  }
  for (float w : rec.weights) put_f32(out, w);
  return out;
}

std::string encode_attention(const std::vector<AttentionRecord>& records) {
  if (records.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw ValidationError("too many records");
  }
  std::string out =
      encode_attention_header(static_cast<std::uint32_t>(records.size()));
  for (const AttentionRecord& rec : records) out += encode_attention_record(rec);
  return out;
}

void write_attention_file(std::ostream& output,
                          const std::vector<AttentionRecord>& records) {
  const std::string bytes = encode_attention(records);
  output.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void write_attention_file(const std::string& path,
                          const std::vector<AttentionRecord>& records) {
  const std::string bytes = encode_attention(records);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write attention file '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for '" + path + "'");
}

StrippedRecord strip_special_tokens(const AttentionRecord& record,
                                    bool renormalize) {
  return strip_impl(record, renormalize);
}

StrippedRecord strip_special_tokens(const StrippedRecord& record,
                                    bool renormalize) {
  return strip_impl(record, renormalize);
}

AttentionRecord to_attention_record(const StrippedRecord& record) {
  AttentionRecord out;
  out.sent_id = record.sent_id;
  out.n_layers = static_cast<std::uint16_t>(record.n_layers);
  out.n_heads = static_cast<std::uint16_t>(record.n_heads);
  out.model_tokens = record.model_tokens;
  out.weights.reserve(record.weights.size());
  for (double w : record.weights) out.weights.push_back(static_cast<float>(w));
  return out;
}

}  // namespace attndep
