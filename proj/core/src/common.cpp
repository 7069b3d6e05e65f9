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

#include "attndep/common.hpp"

#include <cmath>

namespace attndep {

double SquareMatrix::row_sum(std::size_t r) const {
  double sum = 0.0;
  const double* p = row(r);
  for (std::size_t c = 0; c < n_; ++c) sum += p[c];
  return sum;
}

void SquareMatrix::normalize_rows() {
  for (std::size_t r = 0; r < n_; ++r) {
    const double sum = row_sum(r);
    if (sum <= 0.0 || std::abs(sum - 1.0) <= 1e-12) continue;
    double* p = row(r);
    for (std::size_t c = 0; c < n_; ++c) p[c] /= sum;
  }
}

std::size_t utf8_length(const std::string& text) {
  std::size_t n = 0;
  for (unsigned char ch : text) {
    if ((ch & 0xC0) != 0x80) ++n;
  }
  return n;
}

}  // namespace attndep
