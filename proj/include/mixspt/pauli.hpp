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
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mixspt {

class SizeMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace bits {

inline std::size_t words_for(std::size_t n) { return (n + 63) / 64; }

// Phase exponent (powers of i) picked up by sigma(a) * sigma(b) over a word, where
// sigma(1,1) = Y.
inline int product_phase(uint64_t x1, uint64_t z1, uint64_t x2, uint64_t z2) {
  uint64_t y1 = x1 & z1, xo1 = x1 & ~z1, zo1 = z1 & ~x1;
  uint64_t y2 = x2 & z2, xo2 = x2 & ~z2, zo2 = z2 & ~x2;
  uint64_t plus = (y1 & zo2) | (xo1 & y2) | (zo1 & xo2);
  uint64_t minus = (y1 & xo2) | (xo1 & zo2) | (zo1 & y2);
  return std::popcount(plus) - std::popcount(minus);
}

}  // namespace bits

class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(std::size_t n) : n_(n), w_(bits::words_for(n), 0) {}

  std::size_t size() const { return n_; }
  bool get(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i, bool v) {
    uint64_t m = uint64_t{1} << (i & 63);
    if (v) w_[i >> 6] |= m; else w_[i >> 6] &= ~m;
  }
  void flip(std::size_t i) { w_[i >> 6] ^= uint64_t{1} << (i & 63); }

  BitVec& operator^=(const BitVec& o) {
    if (o.n_ != n_) throw SizeMismatch("BitVec size mismatch");
    for (std::size_t k = 0; k < w_.size(); ++k) w_[k] ^= o.w_[k];
    return *this;
  }
  bool any() const {
    for (auto w : w_) if (w) return true;
    return false;
  }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : w_) c += std::popcount(w);
    return c;
  }
  bool operator==(const BitVec&) const = default;

  std::span<uint64_t> words() { return w_; }
  std::span<const uint64_t> words() const { return w_; }

 private:
  std::size_t n_ = 0;
  std::vector<uint64_t> w_;
};

// Parity of popcount(a & b).
inline bool dot(const BitVec& a, const BitVec& b) {
  if (a.size() != b.size()) throw SizeMismatch("BitVec size mismatch");
  uint64_t acc = 0;
  auto wa = a.words();
  auto wb = b.words();
  for (std::size_t k = 0; k < wa.size(); ++k) acc ^= wa[k] & wb[k];
  return std::popcount(acc) & 1;
}

// i^phase * tensor_q sigma(x_q, z_q), with sigma(0,0)=I, (1,0)=X, (0,1)=Z, (1,1)=Y.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(std::size_t n) : n_(n), x_(n), z_(n) {}

  // "+XZ_Y", "-iXX", "ZZI"; '_' and 'I' are identity.
  static PauliString parse(std::string_view s) {
    unsigned ph = 0;
    std::size_t pos = 0;
    if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
      if (s[pos] == '-') ph = 2;
      ++pos;
    }
    if (pos < s.size() && s[pos] == 'i') {
      ph += 1;
      ++pos;
    }
    PauliString p(s.size() - pos);
    for (std::size_t q = 0; pos + q < s.size(); ++q) p.set(q, s[pos + q]);
    p.phase_ = ph & 3u;
    return p;
  }
  static PauliString single(std::size_t n, std::size_t q, char c) {
    PauliString p(n);
    p.set(q, c);
    return p;
  }
  static PauliString on(std::size_t n, std::span<const std::size_t> qubits, char c) {
    PauliString p(n);
    for (auto q : qubits) p.set(q, c);
    return p;
  }

  std::size_t n_qubits() const { return n_; }
  bool x(std::size_t q) const { return x_.get(q); }
  bool z(std::size_t q) const { return z_.get(q); }
  const BitVec& xs() const { return x_; }
  const BitVec& zs() const { return z_; }
  BitVec& xs() { return x_; }
  BitVec& zs() { return z_; }
  unsigned phase() const { return phase_; }
  void set_phase(unsigned ph) { phase_ = ph & 3u; }

  char at(std::size_t q) const {
    static constexpr char table[4] = {'I', 'X', 'Z', 'Y'};
    return table[(x(q) ? 1 : 0) | (z(q) ? 2 : 0)];
  }
  void set(std::size_t q, char c) {
    if (q >= n_) throw std::out_of_range("qubit index out of range");
    switch (c) {
      case 'I': case '_': x_.set(q, false); z_.set(q, false); break;
      case 'X': x_.set(q, true); z_.set(q, false); break;
      case 'Z': x_.set(q, false); z_.set(q, true); break;
      case 'Y': x_.set(q, true); z_.set(q, true); break;
      default: throw std::invalid_argument(std::string("bad Pauli letter ") + c);
    }
  }

  bool is_hermitian() const { return (phase_ & 1u) == 0; }
  int sign() const {
    if (!is_hermitian()) throw std::domain_error("non-Hermitian Pauli has no real sign");
    return phase_ == 0 ? 1 : -1;
  }
  bool is_identity() const { return !x_.any() && !z_.any(); }
  std::size_t weight() const {
    std::size_t w = 0;
    auto xw = x_.words();
    auto zw = z_.words();
    for (std::size_t k = 0; k < xw.size(); ++k) w += std::popcount(xw[k] | zw[k]);
    return w;
  }

  bool commutes(const PauliString& o) const {
    check_size(o);
    return dot(x_, o.z_) == dot(z_, o.x_);
  }

  PauliString& operator*=(const PauliString& o) {
    check_size(o);
    int acc = static_cast<int>(phase_) + static_cast<int>(o.phase_);
    auto x1 = x_.words();
    auto z1 = z_.words();
    auto x2 = o.x_.words();
    auto z2 = o.z_.words();
    for (std::size_t k = 0; k < x1.size(); ++k) {
      acc += bits::product_phase(x1[k], z1[k], x2[k], z2[k]);
      x1[k] ^= x2[k];
      z1[k] ^= z2[k];
    }
    phase_ = static_cast<unsigned>(((acc % 4) + 4) % 4);
    return *this;
  }
  friend PauliString operator*(PauliString a, const PauliString& b) { return a *= b; }

  PauliString operator-() const {
    PauliString r = *this;
    r.phase_ ^= 2u;
    return r;
  }

  // Same Pauli letters, ignoring phase.
  bool same_letters(const PauliString& o) const { return x_ == o.x_ && z_ == o.z_; }
  bool operator==(const PauliString& o) const {
    return n_ == o.n_ && phase_ == o.phase_ && same_letters(o);
  }

  std::string str() const {
    static constexpr const char* pre[4] = {"+", "+i", "-", "-i"};
    std::string s = pre[phase_];
    for (std::size_t q = 0; q < n_; ++q) s += at(q);
    return s;
  }

 private:
  void check_size(const PauliString& o) const {
    if (o.n_ != n_) throw SizeMismatch("Pauli size mismatch");
  }

  std::size_t n_ = 0;
  BitVec x_, z_;
  unsigned phase_ = 0;
};

inline PauliString multiply(const PauliString& p, const PauliString& q) { return p * q; }

}  // namespace mixspt
