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

#ifndef ATTNDEP_ATTENTION_IO_HPP_
#define ATTNDEP_ATTENTION_IO_HPP_

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "attndep/common.hpp"

namespace attndep {

struct ModelToken {
  std::string surface;
  CharSpan span;
  bool is_special = false;

  friend bool operator==(const ModelToken&, const ModelToken&) = default;
};

// Raw attention for one sentence, exactly as stored in an ATNW file.
// weights are indexed [layer][head][from_token][to_token].
struct AttentionRecord {
  std::string sent_id;
  std::uint16_t n_layers = 0;
  std::uint16_t n_heads = 0;
  std::vector<ModelToken> model_tokens;
  std::vector<float> weights;

  std::size_t n_tokens() const { return model_tokens.size(); }
  float weight(std::size_t layer, std::size_t head, std::size_t from,
               std::size_t to) const;

  friend bool operator==(const AttentionRecord&,
                         const AttentionRecord&) = default;
};

// Attention with special tokens removed. Same index order as
// AttentionRecord, kept in double precision.
struct StrippedRecord {
  std::string sent_id;
  std::size_t n_layers = 0;
  std::size_t n_heads = 0;
  std::vector<ModelToken> model_tokens;
  std::vector<double> weights;

  std::size_t n_tokens() const { return model_tokens.size(); }
  SquareMatrix head_matrix(std::size_t layer, std::size_t head) const;

  friend bool operator==(const StrippedRecord&,
                         const StrippedRecord&) = default;
};

inline constexpr char kAtnwMagic[4] = {'A', 'T', 'N', 'W'};
inline constexpr std::uint32_t kAtnwVersion = 1;
inline constexpr double kRowSumTolerance = 1e-4;

// Checks record invariants. Throws ValidationError naming sent_id and, for
// weight problems, layer, head and row.
void validate_record(const AttentionRecord& record,
                     double row_tolerance = kRowSumTolerance);

// Streaming reader over an ATNW byte stream.
class AttentionReader {
 public:
  // Reads and checks the header. Throws FormatError on bad magic/version.
  explicit AttentionReader(std::istream& input, bool validate = true);

  std::uint32_t sentence_count() const { return n_sentences_; }

  // Next record in file order, or nullopt once all declared records are read.
  std::optional<AttentionRecord> next();

 private:
  void read_exact(void* dst, std::size_t n, const char* what);
  std::uint32_t read_u32(const char* what);
  std::uint16_t read_u16(const char* what);
  std::string read_string(const char* what);

  std::istream& in_;
  bool validate_;
  std::uint64_t offset_ = 0;
  std::uint32_t n_sentences_ = 0;
  std::uint32_t consumed_ = 0;
};

// Owns the file stream backing an AttentionReader.
class AttentionFile {
 public:
  explicit AttentionFile(const std::string& path, bool validate = true);
  AttentionFile(const AttentionFile&) = delete;
  AttentionFile& operator=(const AttentionFile&) = delete;

  AttentionReader& reader() { return *reader_; }

 private:
  std::ifstream stream_;
  std::optional<AttentionReader> reader_;
};

std::vector<AttentionRecord> read_attention_file(std::istream& input,
                                                 bool validate = true);
std::vector<AttentionRecord> read_attention_file(const std::string& path,
                                                 bool validate = true);

// Byte-exact, deterministic encoding. Refuses (ValidationError) records that
// violate invariants.
void write_attention_file(std::ostream& output,
                          const std::vector<AttentionRecord>& records);
void write_attention_file(const std::string& path,
                          const std::vector<AttentionRecord>& records);
std::string encode_attention(const std::vector<AttentionRecord>& records);

// Pieces of encode_attention for streaming writers: the 12-byte header and
// one validated record.
std::string encode_attention_header(std::uint32_t n_sentences);
std::string encode_attention_record(const AttentionRecord& record);

// Removes special-token rows and columns from every head matrix and, when
// `renormalize` is set, rescales surviving rows to sum to one. Throws
// DomainError if every token is special.
StrippedRecord strip_special_tokens(const AttentionRecord& record,
                                    bool renormalize = true);
StrippedRecord strip_special_tokens(const StrippedRecord& record,
                                    bool renormalize = true);

// Narrows a stripped record back to the on-disk representation.
AttentionRecord to_attention_record(const StrippedRecord& record);

}  // namespace attndep

#endif  // ATTNDEP_ATTENTION_IO_HPP_
