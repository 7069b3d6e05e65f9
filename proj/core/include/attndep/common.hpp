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

#ifndef ATTNDEP_COMMON_HPP_
#define ATTNDEP_COMMON_HPP_

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace attndep {

// Error hierarchy. Every failure surfaced by the library derives from Error
// so callers can catch one type at the boundary.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed CoNLL-U input.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Malformed or truncated ATNW container.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Well-formed data that violates a domain invariant (row sums, spans, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Gold and model tokenizations (or forms and text) cannot be reconciled.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

// Structural precondition failures in extraction/evaluation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Half-open character interval [begin, end), measured in Unicode code points.
struct CharSpan {
  std::uint32_t begin = 0;
  std::uint32_t end = 0;

  std::uint32_t length() const { return end - begin; }
  bool empty() const { return begin == end; }
  friend bool operator==(const CharSpan&, const CharSpan&) = default;
};

// Dense row-major square matrix of doubles. Used for per-head attention at
// model-token and unit level.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, double fill = 0.0)
      : n_(n), data_(n * n, fill) {}

  std::size_t size() const { return n_; }

  double& operator()(std::size_t row, std::size_t col) {
    return data_[row * n_ + col];
  }
  double operator()(std::size_t row, std::size_t col) const {
    return data_[row * n_ + col];
  }

  const double* row(std::size_t r) const { return data_.data() + r * n_; }
  double* row(std::size_t r) { return data_.data() + r * n_; }

  double row_sum(std::size_t r) const;

  // Scales every row to sum to one. Rows already within 1e-12 of one are
  // left untouched so the operation is exactly idempotent.
  void normalize_rows();

  const std::vector<double>& values() const { return data_; }

  friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

// Number of code points in a UTF-8 string. Invalid lead bytes count as one.
std::size_t utf8_length(const std::string& text);

}  // namespace attndep

#endif  // ATTNDEP_COMMON_HPP_
