// Copyright 2026 mixspt Contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <vector>

#include "mixspt/pauli.hpp"

namespace mixspt::gf2 {

// Dense bit matrix, one packed row per entry.
class Matrix {
 public:
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), wpr_(bits::words_for(cols)), w_(rows * wpr_, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool get(std::size_t r, std::size_t c) const { return (row(r)[c >> 6] >> (c & 63)) & 1u; }
  void set(std::size_t r, std::size_t c, bool v) {
    uint64_t m = uint64_t{1} << (c & 63);
    if (v) row(r)[c >> 6] |= m; else row(r)[c >> 6] &= ~m;
  }
  uint64_t* row(std::size_t r) { return w_.data() + r * wpr_; }
  const uint64_t* row(std::size_t r) const { return w_.data() + r * wpr_; }
  std::size_t words_per_row() const { return wpr_; }

  void xor_row(std::size_t dst, std::size_t src) {
    uint64_t* d = row(dst);
    const uint64_t* s = row(src);
    for (std::size_t k = 0; k < wpr_; ++k) d[k] ^= s[k];
  }
  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t k = 0; k < wpr_; ++k) std::swap(row(a)[k], row(b)[k]);
  }

  // In-place row echelon form; returns the rank.
  std::size_t eliminate() {
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols_ && r < rows_; ++c) {
      std::size_t piv = r;
      while (piv < rows_ && !get(piv, c)) ++piv;
      if (piv == rows_) continue;
      swap_rows(piv, r);
      for (std::size_t i = r + 1; i < rows_; ++i)
        if (get(i, c)) xor_row(i, r);
      ++r;
    }
    return r;
  }

 private:
  std::size_t rows_, cols_, wpr_;
  std::vector<uint64_t> w_;
};

inline std::size_t rank(Matrix m) { return m.eliminate(); }

// Express target as an XOR of rows; returns the selection mask or nothing.
inline std::optional<std::vector<bool>> solve_combination(const Matrix& rows_in,
                                                          std::span<const uint64_t> target) {
  const std::size_t k = rows_in.rows();
  const std::size_t wpr = rows_in.words_per_row();
  // Augment each row with an identity tag to track the combination.
  const std::size_t tag_words = bits::words_for(k);
  Matrix m(k, wpr * 64 + tag_words * 64);
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t w = 0; w < wpr; ++w) m.row(r)[w] = rows_in.row(r)[w];
    m.set(r, wpr * 64 + r, true);
  }
  std::vector<uint64_t> t(m.words_per_row(), 0);
  for (std::size_t w = 0; w < wpr; ++w) t[w] = target[w];

  std::size_t rr = 0;
  std::vector<std::size_t> pivot_cols;
  for (std::size_t c = 0; c < wpr * 64 && rr < k; ++c) {
    std::size_t piv = rr;
    while (piv < k && !m.get(piv, c)) ++piv;
    if (piv == k) continue;
    m.swap_rows(piv, rr);
    for (std::size_t i = 0; i < k; ++i)
      if (i != rr && m.get(i, c)) m.xor_row(i, rr);
    pivot_cols.push_back(c);
    ++rr;
  }
  for (std::size_t i = 0; i < pivot_cols.size(); ++i) {
    std::size_t c = pivot_cols[i];
    if ((t[c >> 6] >> (c & 63)) & 1u) {
      const uint64_t* s = m.row(i);
      for (std::size_t w = 0; w < t.size(); ++w) t[w] ^= s[w];
    }
  }
  for (std::size_t w = 0; w < wpr; ++w)
    if (t[w]) return std::nullopt;
  std::vector<bool> sel(k);
  for (std::size_t r = 0; r < k; ++r) sel[r] = (t[wpr + (r >> 6)] >> (r & 63)) & 1u;
  return sel;
}

}  // namespace mixspt::gf2
