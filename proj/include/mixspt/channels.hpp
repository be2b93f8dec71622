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

#include <Eigen/Eigenvalues>
#include <array>
#include <cmath>
#include <json.hpp>
#include <stdexcept>
#include <string>

#include "mixspt/dense.hpp"
#include "mixspt/rng.hpp"

namespace mixspt {

enum class ChannelKind { z_dephase, y_dephase, swap, controlled_hadamard, sdc };
// Which sublattice the channel hits: a = even sites / vertices, b = odd sites / edges.
enum class SublatticeMask { a, b, both };

class NotPauliChannel : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline const char* to_string(ChannelKind k) {
  switch (k) {
    case ChannelKind::z_dephase: return "z_dephase";
    case ChannelKind::y_dephase: return "y_dephase";
    case ChannelKind::swap: return "swap";
    case ChannelKind::controlled_hadamard: return "controlled_hadamard";
    case ChannelKind::sdc: return "sdc";
  }
  return "?";
}
inline ChannelKind channel_kind_from(const std::string& s) {
  for (auto k : {ChannelKind::z_dephase, ChannelKind::y_dephase, ChannelKind::swap, ChannelKind::controlled_hadamard,
                 ChannelKind::sdc})
    if (s == to_string(k)) return k;
  throw std::invalid_argument("unknown channel kind '" + s + "'");
}
inline const char* to_string(SublatticeMask m) {
  return m == SublatticeMask::a ? "a" : m == SublatticeMask::b ? "b" : "both";
}
inline SublatticeMask mask_from(const std::string& s) {
  if (s == "a") return SublatticeMask::a;
  if (s == "b") return SublatticeMask::b;
  if (s == "both") return SublatticeMask::both;
  throw std::invalid_argument("unknown sublattice mask '" + s + "'");
}

// Per-site channel. Dephasing uses p_a / p_b per sublattice; the remaining kinds act
// with the same parameters on every site selected by the mask.
//   controlled_hadamard: environment |0> rotated to cos(theta)|0> - i sin(theta)|1>,
//     then Hadamard on the system controlled by the environment.
//   sdc: U = CNOT(env -> sys) exp(i theta Y_env) SWAP, env cos(phi)|0> + sin(phi)|1>,
//     applied with probability q (second environment qubit as control).
struct ChannelSpec {
  ChannelKind kind = ChannelKind::z_dephase;
  double p_a = 0, p_b = 0;
  double theta = 0, phi = 0;
  double q = 1;
  SublatticeMask mask = SublatticeMask::both;

  static ChannelSpec z_dephase(double pa, double pb) { return {ChannelKind::z_dephase, pa, pb, 0, 0, 1, SublatticeMask::both}; }
  static ChannelSpec y_dephase(double pa, double pb) { return {ChannelKind::y_dephase, pa, pb, 0, 0, 1, SublatticeMask::both}; }
  static ChannelSpec swap(SublatticeMask m) { return {ChannelKind::swap, 0, 0, 0, 0, 1, m}; }
  static ChannelSpec controlled_hadamard(double theta, SublatticeMask m) {
    return {ChannelKind::controlled_hadamard, 0, 0, theta, 0, 1, m};
  }
  static ChannelSpec sdc(double theta, double phi, double q, SublatticeMask m) {
    return {ChannelKind::sdc, 0, 0, theta, phi, q, m};
  }

  void validate() const {
    auto prob = [](double v, const char* name) {
      if (!(v >= 0 && v <= 1)) throw std::invalid_argument(std::string(name) + " must lie in [0,1]");
    };
    prob(p_a, "p_a");
    prob(p_b, "p_b");
    prob(q, "q");
    if (!(theta >= 0 && theta <= M_PI / 2 + 1e-12)) throw std::invalid_argument("theta must lie in [0, pi/2]");
    if (!std::isfinite(phi)) throw std::invalid_argument("phi must be finite");
  }

  bool is_dephasing() const { return kind == ChannelKind::z_dephase || kind == ChannelKind::y_dephase; }
  bool is_pauli() const { return is_dephasing(); }

  bool hits(int sublattice) const {
    if (is_dephasing()) return strength(sublattice) > 0;
    return mask == SublatticeMask::both || (mask == SublatticeMask::a) == (sublattice == 0);
  }
  double strength(int sublattice) const { return sublattice == 0 ? p_a : p_b; }
};

inline void to_json(nlohmann::json& j, const ChannelSpec& c) {
  j = {{"kind", to_string(c.kind)}, {"p_a", c.p_a}, {"p_b", c.p_b}, {"theta", c.theta},
       {"phi", c.phi},              {"q", c.q},     {"mask", to_string(c.mask)}};
}
inline void from_json(const nlohmann::json& j, ChannelSpec& c) {
  c = ChannelSpec{};
  c.kind = channel_kind_from(j.at("kind").get<std::string>());
  c.p_a = j.value("p_a", 0.0);
  c.p_b = j.value("p_b", 0.0);
  c.theta = j.value("theta", 0.0);
  c.phi = j.value("phi", 0.0);
  c.q = j.value("q", 1.0);
  c.mask = mask_from(j.value("mask", std::string("both")));
  c.validate();
}

namespace channel_detail {

inline CMat hadamard() { return (CMat(2, 2) << M_SQRT1_2, M_SQRT1_2, M_SQRT1_2, -M_SQRT1_2).finished(); }

// Controlled-u on local bits (bit0 = target system, bit `ctrl` = control).
inline CMat controlled(const CMat& u, std::size_t ctrl, std::size_t nbits) {
  const std::size_t d = std::size_t{1} << nbits;
  CMat m = CMat::Zero(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    if (!((i >> ctrl) & 1u)) {
      m(i, i) = 1;
      continue;
    }
    std::size_t base = i & ~std::size_t{1};
    for (std::size_t b = 0; b < 2; ++b) m(base | b, i) = u(b, i & 1u);
  }
  return m;
}

inline CMat sdc_unitary(double theta) {
  // bits: 0 = system, 1 = environment
  CMat swap = CMat::Zero(4, 4);
  swap(0, 0) = swap(3, 3) = 1;
  swap(1, 2) = swap(2, 1) = 1;
  CMat ry(2, 2);
  ry << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);  // exp(i theta Y)
  CMat rot = kron_low_first(CMat::Identity(2, 2), ry);
  CMat cnot = controlled(pauli_matrix('X'), 1, 2);
  return cnot * rot * swap;
}

inline void drop_zero(KrausChannel& ch) {
  std::vector<CMat> keep;
  for (auto& k : ch.operators)
    if (k.cwiseAbs().maxCoeff() > 1e-15) keep.push_back(k);
  ch.operators = std::move(keep);
}

}  // namespace channel_detail

// Explicit SDC Kraus pair (environment read out in its Z basis).
inline std::array<CMat, 2> sdc_kraus_pair(double theta, double phi) {
  const cplx i(0, 1);
  const CMat I = CMat::Identity(2, 2), X = pauli_matrix('X'), Y = pauli_matrix('Y'), Z = pauli_matrix('Z');
  CMat k0 = 0.5 * std::cos(theta - phi) * I + 0.5 * std::sin(theta + phi) * X + 0.5 * std::sin(theta - phi) * i * Y +
            0.5 * std::cos(theta + phi) * Z;
  CMat k1 = 0.5 * std::cos(theta + phi) * I - 0.5 * std::sin(theta - phi) * X + 0.5 * std::sin(theta + phi) * i * Y -
            0.5 * std::cos(theta - phi) * Z;
  return {k0, k1};
}

// Kraus set for a site on the given sublattice (identity if the site is not hit).
inline KrausChannel kraus_of(const ChannelSpec& spec, int sublattice) {
  spec.validate();
  const CMat I = CMat::Identity(2, 2);
  KrausChannel ch;
  if (!spec.hits(sublattice)) {
    ch.operators = {I};
    return ch;
  }
  switch (spec.kind) {
    case ChannelKind::z_dephase:
    case ChannelKind::y_dephase: {
      double p = spec.strength(sublattice);
      ch.operators = {std::sqrt(1 - p) * I,
                      std::sqrt(p) * pauli_matrix(spec.kind == ChannelKind::z_dephase ? 'Z' : 'Y')};
      break;
    }
    case ChannelKind::swap: {
      CMat pp = 0.5 * (I + pauli_matrix('X')), pm = 0.5 * (I - pauli_matrix('X'));
      ch.operators = {pp, pauli_matrix('Z') * pm};
      break;
    }
    case ChannelKind::controlled_hadamard:
      ch.operators = {std::cos(spec.theta) * I, cplx(0, -std::sin(spec.theta)) * channel_detail::hadamard()};
      break;
    case ChannelKind::sdc: {
      auto k = sdc_kraus_pair(spec.theta, spec.phi);
      ch.operators = {std::sqrt(1 - spec.q) * I, std::sqrt(spec.q) * k[0], std::sqrt(spec.q) * k[1]};
      break;
    }
  }
  channel_detail::drop_zero(ch);
  ch.check_cptp();
  return ch;
}

// Local unitary on (system bit 0, environment bits 1..n_env) and the environment's
// initial state (environment bit 0 = local bit 1).
struct Purification {
  CMat unitary;
  CVec env_state;
  std::size_t n_env = 1;
};

inline Purification purification(const ChannelSpec& spec, int sublattice) {
  spec.validate();
  Purification pu;
  CVec e(2);
  if (!spec.hits(sublattice)) {
    pu.unitary = CMat::Identity(4, 4);
    e << 1, 0;
    pu.env_state = e;
    return pu;
  }
  switch (spec.kind) {
    case ChannelKind::z_dephase:
    case ChannelKind::y_dephase: {
      double p = spec.strength(sublattice);
      e << std::sqrt(1 - p), std::sqrt(p);
      pu.unitary = channel_detail::controlled(pauli_matrix(spec.kind == ChannelKind::z_dephase ? 'Z' : 'Y'), 1, 2);
      break;
    }
    case ChannelKind::swap:
      e << M_SQRT1_2, M_SQRT1_2;
      pu.unitary = CMat::Zero(4, 4);
      pu.unitary(0, 0) = pu.unitary(3, 3) = 1;
      pu.unitary(1, 2) = pu.unitary(2, 1) = 1;
      break;
    case ChannelKind::controlled_hadamard:
      e << std::cos(spec.theta), cplx(0, -std::sin(spec.theta));
      pu.unitary = channel_detail::controlled(channel_detail::hadamard(), 1, 2);
      break;
    case ChannelKind::sdc: {
      e << std::cos(spec.phi), std::sin(spec.phi);
      CMat u = channel_detail::sdc_unitary(spec.theta);
      if (spec.q >= 1.0) {
        pu.unitary = u;
        break;
      }
      // Second environment qubit (local bit 2) switches the interaction on.
      CMat full = CMat::Zero(8, 8);
      full.topLeftCorner(4, 4) = CMat::Identity(4, 4);
      full.bottomRightCorner(4, 4) = u;
      CVec e2(2);
      e2 << std::sqrt(1 - spec.q), std::sqrt(spec.q);
      pu.unitary = full;
      pu.n_env = 2;
      CVec both(4);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) both(a | (b << 1)) = e(a) * e2(b);
      pu.env_state = both;
      return pu;
    }
  }
  pu.env_state = e;
  return pu;
}

// Kraus set read off the purification in the environment's computational basis.
inline KrausChannel kraus_from_purification(const Purification& pu) {
  const std::size_t de = std::size_t{1} << pu.n_env;
  KrausChannel ch;
  for (std::size_t k = 0; k < de; ++k) {
    CMat m = CMat::Zero(2, 2);
    for (std::size_t s = 0; s < 2; ++s)
      for (std::size_t s2 = 0; s2 < 2; ++s2)
        for (std::size_t e0 = 0; e0 < de; ++e0) m(s, s2) += pu.unitary(s | (k << 1), s2 | (e0 << 1)) * pu.env_state(e0);
    ch.operators.push_back(m);
  }
  return ch;
}

// G^SE = U X_sys U^dagger split as sum_m P_m (x) O^(m) when block diagonal in the
// system X basis. O[0] is for m = +1, O[1] for m = -1; both act on the environment.
struct TransformedCharge {
  bool decomposable = false;
  std::size_t n_env = 1;
  std::array<CMat, 2> O;
  double off_diagonal_norm = 0;

  CMat env_projector(int m, int e) const {
    const CMat& o = O[m == 1 ? 0 : 1];
    return 0.5 * (CMat::Identity(o.rows(), o.cols()) + static_cast<double>(e) * o);
  }
};

inline TransformedCharge transformed_charge(const ChannelSpec& spec, int sublattice) {
  auto pu = purification(spec, sublattice);
  const std::size_t de = std::size_t{1} << pu.n_env;
  CMat xs = kron_low_first(pauli_matrix('X'), CMat::Identity(de, de));
  CMat g = pu.unitary * xs * pu.unitary.adjoint();
  // Rotate the system bit to the X basis.
  CMat hh = kron_low_first(channel_detail::hadamard(), CMat::Identity(de, de));
  CMat gx = hh * g * hh;
  TransformedCharge tc;
  tc.n_env = pu.n_env;
  auto block = [&](int a, int b) {
    CMat m(de, de);
    for (std::size_t i = 0; i < de; ++i)
      for (std::size_t j = 0; j < de; ++j) m(i, j) = gx(a | (i << 1), b | (j << 1));
    return m;
  };
  tc.off_diagonal_norm = block(0, 1).cwiseAbs().maxCoeff();
  tc.decomposable = tc.off_diagonal_norm < 1e-10;
  tc.O = {block(0, 0), block(1, 1)};
  return tc;
}

// Minimal Kraus set from the Choi matrix (linearly independent operators).
inline KrausChannel canonical_kraus(const KrausChannel& ch) {
  const auto d = ch.operators.front().rows();
  CMat choi = CMat::Zero(d * d, d * d);
  for (const auto& k : ch.operators) {
    CVec v(d * d);
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = 0; b < d; ++b) v(a * d + b) = k(a, b);
    choi += v * v.adjoint();
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(choi);
  KrausChannel out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    double lam = es.eigenvalues()(i);
    if (lam < 1e-12) continue;
    CMat k(d, d);
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = 0; b < d; ++b) k(a, b) = std::sqrt(lam) * es.eigenvectors()(a * d + b, i);
    out.operators.push_back(k);
  }
  return out;
}

struct WeakSymmetryReport {
  bool weakly_symmetric = false;
  double residual = 0;     // least-squares residual of X K_i X = sum_j x_ij K_j
  double unitarity = 0;    // ||x x^dagger - 1||
};

inline WeakSymmetryReport weak_symmetry(const ChannelSpec& spec, int sublattice = 1) {
  auto ch = canonical_kraus(kraus_of(spec, sublattice));
  const std::size_t r = ch.operators.size();
  const auto d = ch.operators.front().rows();
  CMat basis(d * d, r);
  for (std::size_t j = 0; j < r; ++j)
    for (Eigen::Index a = 0; a < d * d; ++a) basis(a, j) = ch.operators[j].reshaped()(a);
  const CMat X = pauli_matrix('X');
  CMat x(r, r);
  double res = 0;
  auto qr = basis.colPivHouseholderQr();
  for (std::size_t i = 0; i < r; ++i) {
    CMat t = X * ch.operators[i] * X;
    CVec target = t.reshaped();
    CVec coef = qr.solve(target);
    res = std::max(res, (basis * coef - target).norm());
    x.row(i) = coef.transpose();
  }
  WeakSymmetryReport rep;
  rep.residual = res;
  rep.unitarity = (x * x.adjoint() - CMat::Identity(r, r)).cwiseAbs().maxCoeff();
  rep.weakly_symmetric = rep.residual < 1e-9 && rep.unitarity < 1e-9;
  return rep;
}

inline bool is_weakly_symmetric(const ChannelSpec& spec, int sublattice = 1) {
  return weak_symmetry(spec, sublattice).weakly_symmetric;
}

// Pauli-frame interface: probabilities of (I, X, Y, Z) errors.
inline std::array<double, 4> pauli_error_probs(const ChannelSpec& spec, int sublattice) {
  if (!spec.is_pauli()) throw NotPauliChannel(std::string(to_string(spec.kind)) + " is not a Pauli channel");
  spec.validate();
  double p = spec.strength(sublattice);
  if (spec.kind == ChannelKind::z_dephase) return {1 - p, 0, 0, p};
  return {1 - p, 0, p, 0};
}

inline char sample_pauli_error(const ChannelSpec& spec, int sublattice, Rng& rng) {
  auto pr = pauli_error_probs(spec, sublattice);
  double u = rng.uniform();
  static const char letters[4] = {'I', 'X', 'Y', 'Z'};
  for (int k = 0; k < 3; ++k) {
    if (u < pr[k]) return letters[k];
    u -= pr[k];
  }
  return letters[3];
}

}  // namespace mixspt
