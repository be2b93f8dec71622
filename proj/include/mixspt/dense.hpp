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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mixspt/pauli.hpp"
#include "mixspt/stabilizer.hpp"

namespace mixspt {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

class SizeCapExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

class ZeroProbabilityBranch : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

namespace dense_detail {

inline std::vector<std::size_t> local_offsets(std::span<const std::size_t> targets) {
  std::vector<std::size_t> off(std::size_t{1} << targets.size(), 0);
  for (std::size_t l = 0; l < off.size(); ++l)
    for (std::size_t j = 0; j < targets.size(); ++j)
      if ((l >> j) & 1u) off[l] |= std::size_t{1} << targets[j];
  return off;
}

// Apply a 2^k x 2^k matrix to the listed bit positions of a flat amplitude array.
inline void apply_local(cplx* data, std::size_t nbits, const CMat& u, std::span<const std::size_t> targets) {
  const std::size_t dim = std::size_t{1} << targets.size();
  if (static_cast<std::size_t>(u.rows()) != dim || static_cast<std::size_t>(u.cols()) != dim)
    throw SizeMismatch("local operator dimension does not match target count");
  std::size_t mask = 0;
  for (auto t : targets) mask |= std::size_t{1} << t;
  auto off = local_offsets(targets);
  std::vector<cplx> in(dim), out(dim);
  const std::size_t total = std::size_t{1} << nbits;
  for (std::size_t base = 0; base < total; ++base) {
    if (base & mask) continue;
    for (std::size_t l = 0; l < dim; ++l) in[l] = data[base | off[l]];
    for (std::size_t r = 0; r < dim; ++r) {
      cplx acc = 0;
      for (std::size_t c = 0; c < dim; ++c) acc += u(r, c) * in[c];
      out[r] = acc;
    }
    for (std::size_t l = 0; l < dim; ++l) data[base | off[l]] = out[l];
  }
}

inline void check_targets(std::span<const std::size_t> targets, std::size_t n) {
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] >= n) throw std::out_of_range("target qubit out of range");
    for (std::size_t j = i + 1; j < targets.size(); ++j)
      if (targets[i] == targets[j]) throw std::invalid_argument("targets must be distinct");
  }
}

}  // namespace dense_detail

// Eigenvalues in [-1e-10, 0) are clipped; anything more negative is an error.
inline double von_neumann_bits(const CMat& rho) {
  Eigen::SelfAdjointEigenSolver<CMat> es(rho, Eigen::EigenvaluesOnly);
  double s = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    double l = es.eigenvalues()(i);
    if (l < -1e-10) throw std::domain_error("density operator has negative eigenvalue " + std::to_string(l));
    if (l > 0) s -= l * std::log2(l);
  }
  return s;
}

inline CMat pauli_matrix(char c) {
  CMat m(2, 2);
  switch (c) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("bad Pauli letter");
  }
  return m;
}

// Kronecker product with the first factor on the lowest qubit index.
inline CMat kron_low_first(const CMat& low, const CMat& high) {
  CMat r(low.rows() * high.rows(), low.cols() * high.cols());
  for (int hi = 0; hi < high.rows(); ++hi)
    for (int hj = 0; hj < high.cols(); ++hj)
      r.block(hi * low.rows(), hj * low.cols(), low.rows(), low.cols()) = high(hi, hj) * low;
  return r;
}

// Full matrix of a Pauli string (qubit q is bit q of the basis index).
inline CMat pauli_string_matrix(const PauliString& p) {
  CMat m = CMat::Identity(1, 1);
  for (std::size_t q = 0; q < p.n_qubits(); ++q) m = kron_low_first(m, pauli_matrix(p.at(q)));
  static const cplx ph[4] = {1, cplx(0, 1), -1, cplx(0, -1)};
  return ph[p.phase()] * m;
}

struct KrausChannel {
  std::vector<CMat> operators;

  std::size_t arity() const {
    if (operators.empty()) throw std::invalid_argument("empty Kraus set");
    std::size_t d = static_cast<std::size_t>(operators.front().rows());
    std::size_t k = 0;
    while ((std::size_t{1} << k) < d) ++k;
    return k;
  }
  double cptp_residual() const {
    const auto d = operators.front().rows();
    CMat acc = CMat::Zero(d, d);
    for (const auto& k : operators) acc += k.adjoint() * k;
    return (acc - CMat::Identity(d, d)).cwiseAbs().maxCoeff();
  }
  void check_cptp(double tol = 1e-10) const {
    double r = cptp_residual();
    if (r > tol) throw std::domain_error("Kraus set violates completeness by " + std::to_string(r));
  }
};

enum class StateKind { pure, mixed };

class DenseState {
 public:
  static constexpr std::size_t kMaxPure = 22;
  static constexpr std::size_t kMaxMixed = 14;

  static DenseState zeros(std::size_t n) {
    check_cap(n, StateKind::pure);
    CVec v = CVec::Zero(std::size_t{1} << n);
    v(0) = 1;
    return DenseState(n, std::move(v));
  }
  static DenseState from_vector(CVec v) {
    std::size_t n = log2_dim(v.size());
    check_cap(n, StateKind::pure);
    if (std::abs(v.norm() - 1.0) > 1e-10) throw std::domain_error("state vector not normalized");
    return DenseState(n, std::move(v));
  }
  static DenseState from_density(CMat rho) {
    std::size_t n = log2_dim(rho.rows());
    check_cap(n, StateKind::mixed);
    DenseState s;
    s.n_ = n;
    s.kind_ = StateKind::mixed;
    s.rho_ = std::move(rho);
    s.check_density();
    return s;
  }
  // Tensor product, this state on the low qubits.
  DenseState tensor(const DenseState& high) const {
    if (kind_ != StateKind::pure || high.kind_ != StateKind::pure)
      return from_density(kron_low_first(density(), high.density()));
    check_cap(n_ + high.n_, StateKind::pure);
    CVec v(psi_.size() * high.psi_.size());
    for (Eigen::Index h = 0; h < high.psi_.size(); ++h) v.segment(h * psi_.size(), psi_.size()) = high.psi_(h) * psi_;
    return DenseState(n_ + high.n_, std::move(v));
  }

  std::size_t n_qubits() const { return n_; }
  StateKind kind() const { return kind_; }
  const CVec& vec() const {
    if (kind_ != StateKind::pure) throw std::logic_error("mixed state has no vector");
    return psi_;
  }
  CMat density() const {
    if (kind_ == StateKind::mixed) return rho_;
    check_cap(n_, StateKind::mixed);
    return psi_ * psi_.adjoint();
  }
  DenseState to_mixed() const { return from_density(density()); }

  void apply_unitary(const CMat& u, std::span<const std::size_t> targets) {
    dense_detail::check_targets(targets, n_);
    if (kind_ == StateKind::pure) {
      dense_detail::apply_local(psi_.data(), n_, u, targets);
    } else {
      conjugate(u, targets);
    }
  }
  void apply_unitary(const CMat& u, std::initializer_list<std::size_t> targets) {
    std::vector<std::size_t> t(targets);
    apply_unitary(u, std::span<const std::size_t>(t));
  }
  void apply_pauli(const PauliString& p) {
    if (p.n_qubits() != n_) throw SizeMismatch("Pauli size mismatch");
    for (std::size_t q = 0; q < n_; ++q)
      if (p.at(q) != 'I') apply_unitary(pauli_matrix(p.at(q)), {q});
    static const cplx ph[4] = {1, cplx(0, 1), -1, cplx(0, -1)};
    if (kind_ == StateKind::pure) psi_ *= ph[p.phase()];
  }

  DenseState apply_channel(const KrausChannel& ch, std::span<const std::size_t> targets) const {
    dense_detail::check_targets(targets, n_);
    ch.check_cptp();
    if (ch.arity() != targets.size()) throw SizeMismatch("channel arity does not match targets");
    if (ch.operators.size() == 1 && kind_ == StateKind::pure) {
      DenseState out = *this;
      dense_detail::apply_local(out.psi_.data(), n_, ch.operators.front(), targets);
      return out;
    }
    check_cap(n_, StateKind::mixed);
    CMat base = density();
    CMat acc = CMat::Zero(base.rows(), base.cols());
    for (const auto& k : ch.operators) {
      CMat t = base;
      conjugate_raw(t, k, targets);
      acc += t;
    }
    return from_density(std::move(acc));
  }
  DenseState apply_channel(const KrausChannel& ch, std::initializer_list<std::size_t> targets) const {
    std::vector<std::size_t> t(targets);
    return apply_channel(ch, std::span<const std::size_t>(t));
  }

  struct Branch;

  // Two-outcome measurement of a Hermitian operator with +-1 spectrum on targets.
  Branch project(const CMat& basis, std::span<const std::size_t> targets, int outcome) const;
  std::vector<Branch> projective_measure(const CMat& basis, std::span<const std::size_t> targets) const;
  std::vector<Branch> projective_measure(const CMat& basis, std::initializer_list<std::size_t> targets) const;

  // Pure states only: measure one qubit in the X (or Z) basis and drop it. Qubits above
  // q shift down by one. Returns the branch probability; state is left unnormalized
  // when the probability is zero.
  std::pair<double, DenseState> collapse_qubit(std::size_t q, char basis, int outcome) const {
    if (kind_ != StateKind::pure) throw std::logic_error("collapse_qubit needs a pure state");
    if (q >= n_) throw std::out_of_range("qubit out of range");
    const std::size_t half = std::size_t{1} << (n_ - 1);
    const std::size_t low = (std::size_t{1} << q) - 1;
    CVec v(half);
    const double s = outcome == 1 ? 1.0 : -1.0;
    for (std::size_t j = 0; j < half; ++j) {
      std::size_t i0 = (j & low) | ((j & ~low) << 1);
      std::size_t i1 = i0 | (std::size_t{1} << q);
      if (basis == 'X') v(j) = (psi_(i0) + s * psi_(i1)) * M_SQRT1_2;
      else v(j) = outcome == 1 ? psi_(i0) : psi_(i1);
    }
    double prob = v.squaredNorm();
    if (prob > 0) v /= std::sqrt(prob);
    DenseState out;
    out.n_ = n_ - 1;
    out.kind_ = StateKind::pure;
    out.psi_ = std::move(v);
    return {prob, std::move(out)};
  }

  CMat reduced(std::span<const std::size_t> keep) const {
    dense_detail::check_targets(keep, n_);
    std::vector<char> in(n_, 0);
    for (auto q : keep) in[q] = 1;
    std::vector<std::size_t> rest;
    for (std::size_t q = 0; q < n_; ++q)
      if (!in[q]) rest.push_back(q);
    auto off_a = dense_detail::local_offsets(keep);
    auto off_b = dense_detail::local_offsets(rest);
    const std::size_t da = off_a.size(), db = off_b.size();
    if (kind_ == StateKind::pure) {
      CMat m(da, db);
      for (std::size_t b = 0; b < db; ++b)
        for (std::size_t a = 0; a < da; ++a) m(a, b) = psi_(off_a[a] | off_b[b]);
      return m * m.adjoint();
    }
    CMat r = CMat::Zero(da, da);
    for (std::size_t a = 0; a < da; ++a)
      for (std::size_t a2 = 0; a2 < da; ++a2) {
        cplx acc = 0;
        for (std::size_t b = 0; b < db; ++b) acc += rho_(off_a[a] | off_b[b], off_a[a2] | off_b[b]);
        r(a, a2) = acc;
      }
    return r;
  }
  CMat reduced(std::initializer_list<std::size_t> keep) const {
    std::vector<std::size_t> k(keep);
    return reduced(std::span<const std::size_t>(k));
  }

  double entropy(std::span<const std::size_t> region) const {
    dense_detail::check_targets(region, n_);
    if (region.empty()) return 0.0;
    if (kind_ == StateKind::pure && 2 * region.size() > n_) {
      std::vector<char> in(n_, 0);
      for (auto q : region) in[q] = 1;
      std::vector<std::size_t> comp;
      for (std::size_t q = 0; q < n_; ++q)
        if (!in[q]) comp.push_back(q);
      if (comp.empty()) return 0.0;
      return von_neumann_bits(reduced(comp));
    }
    return von_neumann_bits(reduced(region));
  }
  double entropy(std::initializer_list<std::size_t> region) const {
    std::vector<std::size_t> r(region);
    return entropy(std::span<const std::size_t>(r));
  }

  cplx expectation(const PauliString& p) const {
    DenseState t = *this;
    if (kind_ == StateKind::pure) {
      t.apply_pauli(p);
      return psi_.dot(t.psi_);
    }
    CMat m = pauli_string_matrix(p);
    return (rho_ * m).trace();
  }

 private:
  DenseState() = default;
  DenseState(std::size_t n, CVec v) : n_(n), kind_(StateKind::pure), psi_(std::move(v)) {}

  static std::size_t log2_dim(Eigen::Index d) {
    std::size_t n = 0;
    while ((Eigen::Index{1} << n) < d) ++n;
    if ((Eigen::Index{1} << n) != d) throw std::invalid_argument("dimension is not a power of two");
    return n;
  }
  static void check_cap(std::size_t n, StateKind k) {
    if (k == StateKind::pure && n > kMaxPure)
      throw SizeCapExceeded("pure dense state limited to 22 qubits, requested " + std::to_string(n));
    if (k == StateKind::mixed && n > kMaxMixed)
      throw SizeCapExceeded("dense density operator limited to 14 qubits, requested " + std::to_string(n));
  }
  static void check_involution(const CMat& b) {
    const auto d = b.rows();
    if ((b - b.adjoint()).cwiseAbs().maxCoeff() > 1e-10 ||
        (b * b - CMat::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10)
      throw std::invalid_argument("measurement operator must be Hermitian with +-1 spectrum");
  }

  void conjugate_raw(CMat& rho, const CMat& k, std::span<const std::size_t> targets) const {
    std::vector<std::size_t> cols(targets.begin(), targets.end());
    for (auto& c : cols) c += n_;
    dense_detail::apply_local(rho.data(), 2 * n_, k, targets);
    dense_detail::apply_local(rho.data(), 2 * n_, k.conjugate(), cols);
  }
  void conjugate(const CMat& u, std::span<const std::size_t> targets) { conjugate_raw(rho_, u, targets); }

  void check_density() const {
    if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > 1e-10) throw std::domain_error("density not Hermitian");
    if (std::abs(rho_.trace() - cplx(1.0)) > 1e-10) throw std::domain_error("density trace not one");
  }

  std::size_t n_ = 0;
  StateKind kind_ = StateKind::pure;
  CVec psi_;
  CMat rho_;
};

struct DenseState::Branch {
  int outcome;
  double prob;
  DenseState post;
};

inline DenseState::Branch DenseState::project(const CMat& basis, std::span<const std::size_t> targets, int outcome) const {
  dense_detail::check_targets(targets, n_);
  check_involution(basis);
  const auto d = basis.rows();
  CMat proj = 0.5 * (CMat::Identity(d, d) + static_cast<double>(outcome) * basis);
  DenseState out = *this;
  double prob;
  if (kind_ == StateKind::pure) {
    dense_detail::apply_local(out.psi_.data(), n_, proj, targets);
    prob = out.psi_.squaredNorm();
    if (prob < 1e-14) throw ZeroProbabilityBranch("requested measurement branch has zero probability");
    out.psi_ /= std::sqrt(prob);
  } else {
    conjugate_raw(out.rho_, proj, targets);
    prob = out.rho_.trace().real();
    if (prob < 1e-14) throw ZeroProbabilityBranch("requested measurement branch has zero probability");
    out.rho_ /= prob;
  }
  return {outcome, prob, std::move(out)};
}
inline std::vector<DenseState::Branch> DenseState::projective_measure(const CMat& basis, std::span<const std::size_t> targets) const {
  std::vector<Branch> out;
  for (int o : {1, -1}) {
    try {
      out.push_back(project(basis, targets, o));
    } catch (const ZeroProbabilityBranch&) {
    }
  }
  double tot = 0;
  for (auto& b : out) tot += b.prob;
  if (std::abs(tot - 1.0) > 1e-10) throw std::domain_error("branch probabilities do not sum to one");
  return out;
}
inline std::vector<DenseState::Branch> DenseState::projective_measure(const CMat& basis, std::initializer_list<std::size_t> targets) const {
  std::vector<std::size_t> t(targets);
  return projective_measure(basis, std::span<const std::size_t>(t));
}

inline double mutual_information(const DenseState& s, std::span<const std::size_t> a,
                                 std::span<const std::size_t> b) {
  for (auto x : a)
    for (auto y : b)
      if (x == y) throw std::invalid_argument("mutual information regions overlap");
  std::vector<std::size_t> ab(a.begin(), a.end());
  ab.insert(ab.end(), b.begin(), b.end());
  return s.entropy(a) + s.entropy(b) - s.entropy(ab);
}
inline double mutual_information(const DenseState& s, std::initializer_list<std::size_t> a,
                                 std::initializer_list<std::size_t> b) {
  std::vector<std::size_t> va(a), vb(b);
  return mutual_information(s, std::span<const std::size_t>(va), std::span<const std::size_t>(vb));
}

// Stabilizer state -> state vector: project a basis state in the support.
inline DenseState to_dense(const StabilizerState& st) {
  if (!st.is_pure()) throw std::invalid_argument("to_dense needs a pure stabilizer state");
  const std::size_t n = st.n_qubits();
  auto gens = st.generators();
  // Eliminate X parts to expose the Z-only subgroup (with exact phases).
  std::vector<PauliString> rows = gens;
  std::size_t r = 0;
  for (std::size_t q = 0; q < n && r < rows.size(); ++q) {
    std::size_t piv = r;
    while (piv < rows.size() && !rows[piv].x(q)) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[piv], rows[r]);
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (i != r && rows[i].x(q)) rows[i] *= rows[r];
    ++r;
  }
  // rows[r..] are Z-only: require (-1)^{z.b} = sign.
  std::size_t nz = rows.size() - r;
  gf2::Matrix sys(nz, n + 1);
  for (std::size_t i = 0; i < nz; ++i) {
    for (std::size_t q = 0; q < n; ++q) sys.set(i, q, rows[r + i].z(q));
    sys.set(i, n, rows[r + i].sign() == -1);
  }
  // Back-substitute a solution with free variables zero.
  std::size_t rank = 0;
  std::vector<std::size_t> pc;
  for (std::size_t c = 0; c < n && rank < nz; ++c) {
    std::size_t piv = rank;
    while (piv < nz && !sys.get(piv, c)) ++piv;
    if (piv == nz) continue;
    sys.swap_rows(piv, rank);
    for (std::size_t i = 0; i < nz; ++i)
      if (i != rank && sys.get(i, c)) sys.xor_row(i, rank);
    pc.push_back(c);
    ++rank;
  }
  std::size_t b = 0;
  for (std::size_t i = 0; i < pc.size(); ++i)
    if (sys.get(i, n)) b |= std::size_t{1} << pc[i];
  CVec v = CVec::Zero(std::size_t{1} << n);
  v(b) = 1;
  DenseState s = DenseState::from_vector(v);
  CVec acc = s.vec();
  for (const auto& g : gens) {
    DenseState t = DenseState::from_vector(acc / acc.norm());
    double nrm = acc.norm();
    t.apply_pauli(g);
    acc = 0.5 * (acc + nrm * t.vec());
  }
  return DenseState::from_vector(acc / acc.norm());
}

}  // namespace mixspt
