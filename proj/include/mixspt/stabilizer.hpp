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

#include <algorithm>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "mixspt/gf2.hpp"
#include "mixspt/pauli.hpp"
#include "mixspt/rng.hpp"

namespace mixspt {

class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct MeasureResult {
  int outcome = 1;
  bool deterministic = true;
};

// Stabilizer group with k <= n Hermitian generators. Pure states (k == n) also carry
// destabilizers so deterministic measurements avoid elimination.
class StabilizerState {
 public:
  StabilizerState() = default;

  static StabilizerState zeros(std::size_t n) {
    StabilizerState s(n);
    s.pure_ = true;
    s.k_ = n;
    s.rows_ = 2 * n;
    s.data_.assign(s.rows_ * 2 * s.w_, 0);
    s.phase_.assign(s.rows_, 0);
    for (std::size_t q = 0; q < n; ++q) {
      s.set_bit(s.xrow(q), q);           // destabilizer X_q
      s.set_bit(s.zrow(n + q), q);       // stabilizer Z_q
    }
    return s;
  }
  static StabilizerState plus(std::size_t n) {
    auto s = zeros(n);
    for (std::size_t q = 0; q < n; ++q) s.h(q);
    return s;
  }

  static StabilizerState from_generators(std::span<const PauliString> gens, std::size_t n) {
    StabilizerState s(n);
    if (gens.size() > n) throw InvariantViolation("more generators than qubits");
    s.k_ = gens.size();
    s.rows_ = s.k_;
    s.data_.assign(s.rows_ * 2 * s.w_, 0);
    s.phase_.assign(s.rows_, 0);
    for (std::size_t i = 0; i < gens.size(); ++i) {
      if (gens[i].n_qubits() != n) throw SizeMismatch("generator size mismatch");
      if (!gens[i].is_hermitian()) throw InvariantViolation("generator not Hermitian");
      s.store(i, gens[i]);
    }
    s.check_invariants();
    if (s.k_ == n) s.complete_destabilizers();
    return s;
  }
  static StabilizerState from_generators(const std::vector<PauliString>& gens, std::size_t n) {
    return from_generators(std::span<const PauliString>(gens), n);
  }

  std::size_t n_qubits() const { return n_; }
  std::size_t num_generators() const { return k_; }
  bool is_pure() const { return k_ == n_; }

  PauliString generator(std::size_t i) const { return load(stab_row(i)); }
  std::vector<PauliString> generators() const {
    std::vector<PauliString> g;
    g.reserve(k_);
    for (std::size_t i = 0; i < k_; ++i) g.push_back(generator(i));
    return g;
  }

  // +1/-1 when +-p is in the group, nothing otherwise (including anticommuting p).
  std::optional<int> group_sign(const PauliString& p) const {
    check_operand(p);
    for (std::size_t i = 0; i < k_; ++i)
      if (anticommutes(stab_row(i), p)) return std::nullopt;
    if (pure_) {
      std::vector<uint64_t> acc(2 * w_, 0);
      uint64_t* ax = acc.data();
      uint64_t* az = acc.data() + w_;
      int ph = 0;
      for (std::size_t i = 0; i < n_; ++i) {
        if (!anticommutes(i, p)) continue;
        const std::size_t r = stab_row(i);
        ph += phase_[r];
        for (std::size_t k = 0; k < w_; ++k) {
          ph += bits::product_phase(ax[k], az[k], xrow(r)[k], zrow(r)[k]);
          ax[k] ^= xrow(r)[k];
          az[k] ^= zrow(r)[k];
        }
      }
      auto px = p.xs().words();
      auto pz = p.zs().words();
      if (!std::equal(px.begin(), px.end(), ax) || !std::equal(pz.begin(), pz.end(), az))
        throw InvariantViolation("group product does not reproduce operator");
      unsigned d = static_cast<unsigned>((((ph - static_cast<int>(p.phase())) % 4) + 4) % 4);
      if (d & 1u) throw InvariantViolation("group element with imaginary phase");
      return d == 0 ? 1 : -1;
    }
    PauliString prod(n_);
    {
      auto sel = combination_for(p);
      if (!sel) return std::nullopt;
      for (std::size_t i = 0; i < k_; ++i)
        if ((*sel)[i]) prod *= load(stab_row(i));
    }
    if (!prod.same_letters(p)) throw InvariantViolation("group product does not reproduce operator");
    unsigned d = (prod.phase() + 4u - p.phase()) & 3u;
    if (d & 1u) throw InvariantViolation("group element with imaginary phase");
    return d == 0 ? 1 : -1;
  }

  double expectation(const PauliString& p) const {
    if (!p.is_hermitian()) throw std::invalid_argument("expectation of non-Hermitian Pauli");
    auto s = group_sign(p);
    return s ? static_cast<double>(*s) : 0.0;
  }

  MeasureResult measure(const PauliString& p, Rng& rng) {
    return measure_impl(p, [&rng] { return rng.pm1(); });
  }

  // Post-select a measurement outcome; returns its Born probability (0 leaves the
  // state untouched).
  double measure_forced(const PauliString& p, int outcome) {
    if (outcome != 1 && outcome != -1) throw std::invalid_argument("outcome must be +-1");
    auto det = deterministic_outcome(p);
    if (det) return *det == outcome ? 1.0 : 0.0;
    measure_impl(p, [outcome] { return outcome; });
    return 0.5;
  }

  // A generator anticommuting with p; conjugating by it swaps the two outcome branches.
  std::optional<PauliString> anticommuting_generator(const PauliString& p) const {
    check_operand(p);
    for (std::size_t i = 0; i < k_; ++i)
      if (anticommutes(stab_row(i), p)) return load(stab_row(i));
    return std::nullopt;
  }

  std::optional<int> deterministic_outcome(const PauliString& p) const {
    check_hermitian(p);
    return group_sign(p);
  }

  // Conjugate by a Pauli (error / frame update).
  void apply_pauli(const PauliString& p) {
    check_operand(p);
    for (std::size_t r = 0; r < rows_; ++r)
      if (anticommutes(r, p)) phase_[r] ^= 2u;
  }

  void h(std::size_t q) {
    check_qubit(q);
    for (std::size_t r = 0; r < rows_; ++r) {
      bool x = get_bit(xrow(r), q), z = get_bit(zrow(r), q);
      if (x && z) phase_[r] ^= 2u;
      assign_bit(xrow(r), q, z);
      assign_bit(zrow(r), q, x);
    }
  }
  void s(std::size_t q) {
    check_qubit(q);
    for (std::size_t r = 0; r < rows_; ++r) {
      bool x = get_bit(xrow(r), q), z = get_bit(zrow(r), q);
      if (x && z) phase_[r] ^= 2u;
      assign_bit(zrow(r), q, z ^ x);
    }
  }
  void cnot(std::size_t c, std::size_t t) {
    check_qubit(c);
    check_qubit(t);
    if (c == t) throw std::invalid_argument("cnot on one qubit");
    for (std::size_t r = 0; r < rows_; ++r) {
      bool xc = get_bit(xrow(r), c), zc = get_bit(zrow(r), c);
      bool xt = get_bit(xrow(r), t), zt = get_bit(zrow(r), t);
      if (xc && zt && (xt == zc)) phase_[r] ^= 2u;
      assign_bit(xrow(r), t, xt ^ xc);
      assign_bit(zrow(r), c, zc ^ zt);
    }
  }
  void cz(std::size_t a, std::size_t b) {
    h(b);
    cnot(a, b);
    h(b);
  }
  void x(std::size_t q) { apply_pauli(PauliString::single(n_, q, 'X')); }
  void y(std::size_t q) { apply_pauli(PauliString::single(n_, q, 'Y')); }
  void z(std::size_t q) { apply_pauli(PauliString::single(n_, q, 'Z')); }

  // Von Neumann entropy in bits: |A| - k + rank(generators restricted to the complement).
  double entropy(std::span<const std::size_t> region) const {
    std::vector<char> in(n_, 0);
    for (auto q : region) {
      check_qubit(q);
      if (in[q]) throw std::invalid_argument("duplicate qubit in region");
      in[q] = 1;
    }
    std::vector<std::size_t> comp;
    for (std::size_t q = 0; q < n_; ++q)
      if (!in[q]) comp.push_back(q);
    // Pure states: S(A) = S(A^c), so rank whichever side is smaller.
    if (k_ == n_ && region.size() < comp.size()) {
      std::vector<std::size_t> r(region.begin(), region.end());
      return static_cast<double>(restricted_rank(r)) - static_cast<double>(region.size());
    }
    return static_cast<double>(region.size()) - static_cast<double>(k_) +
           static_cast<double>(restricted_rank(comp));
  }
  double entropy(std::initializer_list<std::size_t> region) const {
    std::vector<std::size_t> r(region);
    return entropy(std::span<const std::size_t>(r));
  }

  // Rank of the generator set restricted to the listed qubits.
  std::size_t restricted_rank(std::span<const std::size_t> qubits) const {
    if (qubits.empty() || k_ == 0) return 0;
    gf2::Matrix m(k_, 2 * qubits.size());
    for (std::size_t i = 0; i < k_; ++i) {
      const uint64_t* xr = xrow(stab_row(i));
      const uint64_t* zr = zrow(stab_row(i));
      for (std::size_t j = 0; j < qubits.size(); ++j) {
        if (get_bit(xr, qubits[j])) m.set(i, 2 * j, true);
        if (get_bit(zr, qubits[j])) m.set(i, 2 * j + 1, true);
      }
    }
    return m.eliminate();
  }

  void check_invariants() const {
    for (std::size_t i = 0; i < k_; ++i) {
      if (phase_[stab_row(i)] & 1u) throw InvariantViolation("non-Hermitian generator");
      for (std::size_t j = i + 1; j < k_; ++j)
        if (rows_anticommute(stab_row(i), stab_row(j)))
          throw InvariantViolation("generators do not commute");
    }
    // Independence implies -I is not in the group.
    gf2::Matrix m(k_, 2 * n_);
    for (std::size_t i = 0; i < k_; ++i)
      for (std::size_t q = 0; q < n_; ++q) {
        m.set(i, 2 * q, get_bit(xrow(stab_row(i)), q));
        m.set(i, 2 * q + 1, get_bit(zrow(stab_row(i)), q));
      }
    if (m.eliminate() != k_) throw InvariantViolation("generators are dependent");
    if (pure_) {
      for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) {
          bool anti = rows_anticommute(i, stab_row(j));
          if (anti != (i == j)) throw InvariantViolation("destabilizer pairing broken");
        }
    }
  }

 private:
  explicit StabilizerState(std::size_t n) : n_(n), w_(bits::words_for(n)) {}

  std::size_t stab_row(std::size_t i) const { return pure_ ? n_ + i : i; }

  uint64_t* xrow(std::size_t r) { return data_.data() + r * 2 * w_; }
  uint64_t* zrow(std::size_t r) { return data_.data() + r * 2 * w_ + w_; }
  const uint64_t* xrow(std::size_t r) const { return data_.data() + r * 2 * w_; }
  const uint64_t* zrow(std::size_t r) const { return data_.data() + r * 2 * w_ + w_; }

  static bool get_bit(const uint64_t* w, std::size_t q) { return (w[q >> 6] >> (q & 63)) & 1u; }
  static void set_bit(uint64_t* w, std::size_t q) { w[q >> 6] |= uint64_t{1} << (q & 63); }
  static void assign_bit(uint64_t* w, std::size_t q, bool v) {
    uint64_t m = uint64_t{1} << (q & 63);
    if (v) w[q >> 6] |= m; else w[q >> 6] &= ~m;
  }

  void check_qubit(std::size_t q) const {
    if (q >= n_) throw std::out_of_range("qubit index out of range");
  }
  void check_operand(const PauliString& p) const {
    if (p.n_qubits() != n_) throw SizeMismatch("operator size mismatch");
  }
  void check_hermitian(const PauliString& p) const {
    check_operand(p);
    if (!p.is_hermitian()) throw std::invalid_argument("measured Pauli must be Hermitian");
  }

  bool anticommutes(std::size_t r, const PauliString& p) const {
    auto px = p.xs().words();
    auto pz = p.zs().words();
    const uint64_t* xr = xrow(r);
    const uint64_t* zr = zrow(r);
    uint64_t acc = 0;
    for (std::size_t k = 0; k < w_; ++k) acc ^= (xr[k] & pz[k]) ^ (zr[k] & px[k]);
    return std::popcount(acc) & 1;
  }
  bool rows_anticommute(std::size_t a, std::size_t b) const {
    uint64_t acc = 0;
    for (std::size_t k = 0; k < w_; ++k)
      acc ^= (xrow(a)[k] & zrow(b)[k]) ^ (zrow(a)[k] & xrow(b)[k]);
    return std::popcount(acc) & 1;
  }

  // row dst <- row dst * row src
  void rowmul(std::size_t dst, std::size_t src) {
    int acc = phase_[dst] + phase_[src];
    uint64_t* xd = xrow(dst);
    uint64_t* zd = zrow(dst);
    const uint64_t* xs = xrow(src);
    const uint64_t* zs = zrow(src);
    for (std::size_t k = 0; k < w_; ++k) {
      acc += bits::product_phase(xd[k], zd[k], xs[k], zs[k]);
      xd[k] ^= xs[k];
      zd[k] ^= zs[k];
    }
    phase_[dst] = static_cast<uint8_t>(((acc % 4) + 4) % 4);
  }

  void store(std::size_t r, const PauliString& p) {
    auto px = p.xs().words();
    auto pz = p.zs().words();
    std::copy(px.begin(), px.end(), xrow(r));
    std::copy(pz.begin(), pz.end(), zrow(r));
    phase_[r] = static_cast<uint8_t>(p.phase());
  }
  PauliString load(std::size_t r) const {
    PauliString p(n_);
    auto px = p.xs().words();
    auto pz = p.zs().words();
    std::copy(xrow(r), xrow(r) + w_, px.begin());
    std::copy(zrow(r), zrow(r) + w_, pz.begin());
    p.set_phase(phase_[r]);
    return p;
  }

  std::optional<std::vector<bool>> combination_for(const PauliString& p) const {
    gf2::Matrix m(k_, 128 * w_);
    for (std::size_t i = 0; i < k_; ++i) {
      std::copy(xrow(stab_row(i)), xrow(stab_row(i)) + w_, m.row(i));
      std::copy(zrow(stab_row(i)), zrow(stab_row(i)) + w_, m.row(i) + w_);
    }
    std::vector<uint64_t> t(2 * w_);
    auto px = p.xs().words();
    auto pz = p.zs().words();
    std::copy(px.begin(), px.end(), t.begin());
    std::copy(pz.begin(), pz.end(), t.begin() + w_);
    return gf2::solve_combination(m, t);
  }

  template <class Draw>
  MeasureResult measure_impl(const PauliString& p, Draw draw) {
    check_hermitian(p);
    std::size_t piv = k_;
    for (std::size_t i = 0; i < k_; ++i)
      if (anticommutes(stab_row(i), p)) { piv = i; break; }

    if (piv == k_) {
      auto sgn = group_sign(p);
      if (sgn) return {*sgn, true};
      // Mixed state and p outside the group: new generator.
      int o = draw();
      grow_rows();
      PauliString g = o == 1 ? p : -p;
      store(stab_row(k_ - 1), g);
      if (k_ == n_) complete_destabilizers();
      return {o, false};
    }

    const std::size_t pr = stab_row(piv);
    for (std::size_t r = 0; r < rows_; ++r)
      if (r != pr && anticommutes(r, p)) rowmul(r, pr);
    if (pure_) {
      std::copy(xrow(pr), xrow(pr) + 2 * w_, xrow(piv));
      phase_[piv] = phase_[pr];
    }
    int o = draw();
    store(pr, o == 1 ? p : -p);
    return {o, false};
  }

  void grow_rows() {
    ++k_;
    ++rows_;
    data_.resize(rows_ * 2 * w_, 0);
    phase_.resize(rows_, 0);
  }

  // Convert a full generator list (mixed layout) into the destabilizer layout.
  void complete_destabilizers() {
    const std::size_t n = n_;
    gf2::Matrix a(n, 2 * n + n);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t q = 0; q < n; ++q) {
        // Symplectic pairing <d, s_j> = s_j.z . d.x + s_j.x . d.z
        a.set(j, q, get_bit(zrow(j), q));
        a.set(j, n + q, get_bit(xrow(j), q));
      }
      a.set(j, 2 * n + j, true);
    }
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < 2 * n && r < n; ++c) {
      std::size_t piv = r;
      while (piv < n && !a.get(piv, c)) ++piv;
      if (piv == n) continue;
      a.swap_rows(piv, r);
      for (std::size_t i = 0; i < n; ++i)
        if (i != r && a.get(i, c)) a.xor_row(i, r);
      pivots.push_back(c);
      ++r;
    }
    if (r != n) throw InvariantViolation("cannot complete destabilizers: dependent generators");

    std::vector<uint64_t> nd(2 * n * 2 * w_, 0);
    std::vector<uint8_t> nph(2 * n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      uint64_t* dx = nd.data() + i * 2 * w_;
      uint64_t* dz = dx + w_;
      for (std::size_t rr = 0; rr < n; ++rr) {
        if (!a.get(rr, 2 * n + i)) continue;
        std::size_t c = pivots[rr];
        if (c < n) set_bit(dx, c); else set_bit(dz, c - n);
      }
      std::copy(xrow(i), xrow(i) + 2 * w_, nd.data() + (n + i) * 2 * w_);
      nph[n + i] = phase_[i];
    }
    data_ = std::move(nd);
    phase_ = std::move(nph);
    rows_ = 2 * n;
    pure_ = true;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < j; ++i)
        if (rows_anticommute(i, j)) rowmul(j, n + i);
    for (std::size_t i = 0; i < n; ++i) phase_[i] = 0;
  }

  std::size_t n_ = 0;
  std::size_t w_ = 0;
  std::size_t k_ = 0;
  std::size_t rows_ = 0;
  bool pure_ = false;
  std::vector<uint64_t> data_;
  std::vector<uint8_t> phase_;
};

struct MeasurePauliResult {
  int outcome;
  StabilizerState post_state;
  bool deterministic;
};

inline MeasurePauliResult measure_pauli(const StabilizerState& state, const PauliString& p, Rng& rng) {
  StabilizerState post = state;
  auto r = post.measure(p, rng);
  return {r.outcome, std::move(post), r.deterministic};
}

inline double entanglement_entropy(const StabilizerState& state, std::span<const std::size_t> region) {
  if (!state.is_pure()) throw std::invalid_argument("entanglement entropy requires a pure state");
  return state.entropy(region);
}

}  // namespace mixspt
