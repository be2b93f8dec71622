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
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mixspt/channels.hpp"
#include "mixspt/dense.hpp"
#include "mixspt/gf2.hpp"
#include "mixspt/lattice.hpp"
#include "mixspt/rng.hpp"
#include "mixspt/stabilizer.hpp"
#include "mixspt/statmech.hpp"
#include "mixspt/stats.hpp"

namespace mixspt {

// Largest affine subgroup enumerated by the exact stabilizer sum.
inline constexpr std::size_t kMaxSubgroupDim = 26;

class UnsupportedClosedForm : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// <psi| A_0 (x) A_1 (x) ... |psi> for single-qubit operators A_k.
enum class ExpectationEngine { state_vector, stabilizer_sum };

namespace strange_detail {

// Coefficients of a 2x2 operator in the Pauli basis, indexed by (x | z << 1): I, X, Z, Y.
inline std::array<cplx, 4> pauli_coefficients(const CMat& a) {
  std::array<cplx, 4> c{};
  const char letters[4] = {'I', 'X', 'Z', 'Y'};
  for (int k = 0; k < 4; ++k) c[k] = (pauli_matrix(letters[k]) * a).trace() / 2.0;
  return c;
}


inline void check_state_vector_cap(std::size_t n) {
  if (n > DenseState::kMaxPure)
    throw SizeCapExceeded("state-vector expectation limited to 22 qubits, requested " + std::to_string(n));
}

inline cplx state_vector_expectation(const CVec& v, std::size_t n, std::span<const CMat> ops) {
  CVec w = v;
  const std::size_t dim = std::size_t{1} << n;
  for (std::size_t q = 0; q < n; ++q) {
    const CMat& a = ops[q];
    if (a.isIdentity(0)) continue;
    const cplx a00 = a(0, 0), a01 = a(0, 1), a10 = a(1, 0), a11 = a(1, 1);
    const std::size_t bit = std::size_t{1} << q;
    for (std::size_t k = 0; k < dim; ++k) {
      if (k & bit) continue;
      cplx lo = w(k), hi = w(k | bit);
      w(k) = a00 * lo + a01 * hi;
      w(k | bit) = a10 * lo + a11 * hi;
    }
  }
  return v.dot(w);
}

// Sum over the stabilizer group, restricted to elements whose letters can have nonzero
// coefficients. Per qubit the admissible letters are over-approximated by fixing the x
// and/or z bit when one value never occurs; the fixed bits cut the group to an affine
// subspace found by elimination over the generator coefficients.
inline cplx stabilizer_sum_expectation(const StabilizerState& psi, std::span<const CMat> ops) {
  const std::size_t n = psi.n_qubits();
  std::vector<std::array<cplx, 4>> coef;
  coef.reserve(n);
  struct Fix {
    std::size_t qubit;
    bool z_bit;  // constrains the z bit, else the x bit
    bool value;
  };
  std::vector<Fix> fixes;
  for (std::size_t q = 0; q < n; ++q) {
    auto c = pauli_coefficients(ops[q]);
    double scale = 0;
    for (auto v : c) scale = std::max(scale, std::abs(v));
    if (scale == 0) return 0.0;
    for (auto& v : c)
      if (std::abs(v) < 1e-14 * scale) v = 0;
    auto negligible = [](cplx v) { return v == 0.0; };
    for (bool zb : {false, true}) {
      bool zero_when[2];
      for (int bit = 0; bit < 2; ++bit) {
        zero_when[bit] = true;
        for (int k = 0; k < 4; ++k) {
          int b = zb ? (k >> 1) & 1 : k & 1;
          if (b == bit && !negligible(c[k])) zero_when[bit] = false;
        }
      }
      if (zero_when[1]) fixes.push_back({q, zb, false});
      else if (zero_when[0]) fixes.push_back({q, zb, true});
    }
    coef.push_back(c);
  }
  auto gens = psi.generators();
  const std::size_t k = gens.size();
  // Rows: constraints; columns: generator selection, last column the required value.
  gf2::Matrix sys(fixes.size(), k + 1);
  for (std::size_t r = 0; r < fixes.size(); ++r) {
    for (std::size_t g = 0; g < k; ++g)
      sys.set(r, g, fixes[r].z_bit ? gens[g].z(fixes[r].qubit) : gens[g].x(fixes[r].qubit));
    sys.set(r, k, fixes[r].value);
  }
  std::vector<std::size_t> pivots;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < k && rank < fixes.size(); ++c) {
    std::size_t piv = rank;
    while (piv < fixes.size() && !sys.get(piv, c)) ++piv;
    if (piv == fixes.size()) continue;
    sys.swap_rows(piv, rank);
    for (std::size_t i = 0; i < fixes.size(); ++i)
      if (i != rank && sys.get(i, c)) sys.xor_row(i, rank);
    pivots.push_back(c);
    ++rank;
  }
  for (std::size_t i = rank; i < fixes.size(); ++i)
    if (sys.get(i, k)) return 0.0;
  std::vector<char> is_pivot(k, 0);
  for (auto c : pivots) is_pivot[c] = 1;
  std::vector<std::size_t> free_cols;
  for (std::size_t c = 0; c < k; ++c)
    if (!is_pivot[c]) free_cols.push_back(c);
  if (free_cols.size() > kMaxSubgroupDim)
    throw SizeCapExceeded("stabilizer sum limited to 2^26 terms, needs 2^" + std::to_string(free_cols.size()));

  auto product_of = [&](const std::vector<char>& sel) {
    PauliString p(n);
    for (std::size_t g = 0; g < k; ++g)
      if (sel[g]) p *= gens[g];
    return p;
  };
  std::vector<char> sel(k, 0);
  for (std::size_t i = 0; i < pivots.size(); ++i) sel[pivots[i]] = sys.get(i, k);
  PauliString cur = product_of(sel);
  std::vector<PauliString> basis;
  for (auto f : free_cols) {
    std::vector<char> s(k, 0);
    s[f] = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) s[pivots[i]] = sys.get(i, f);
    basis.push_back(product_of(s));
  }
  auto term = [&](const PauliString& p) {
    cplx t = p.sign();
    for (std::size_t q = 0; q < n && t != 0.0; ++q) t *= coef[q][(p.x(q) ? 1 : 0) | (p.z(q) ? 2 : 0)];
    return t;
  };
  cplx acc = term(cur);
  const std::uint64_t total = std::uint64_t{1} << basis.size();
  for (std::uint64_t s = 1; s < total; ++s) {
    cur *= basis[static_cast<std::size_t>(std::countr_zero(s))];
    acc += term(cur);
  }
  return acc;
}

inline CMat x_projector(int sign) { return 0.5 * (CMat::Identity(2, 2) + sign * pauli_matrix('X')); }

}  // namespace strange_detail

namespace strange_detail {
inline void check_ops(std::size_t n, std::span<const CMat> ops) {
  if (ops.size() != n) throw SizeMismatch("one operator per qubit required");
  for (const auto& a : ops)
    if (a.rows() != 2 || a.cols() != 2) throw SizeMismatch("single-qubit operators must be 2x2");
}
}  // namespace strange_detail

inline cplx product_expectation(const StabilizerState& psi, std::span<const CMat> ops, ExpectationEngine engine) {
  if (!psi.is_pure()) throw std::invalid_argument("product expectation needs a pure state");
  strange_detail::check_ops(psi.n_qubits(), ops);
  if (engine == ExpectationEngine::stabilizer_sum) return strange_detail::stabilizer_sum_expectation(psi, ops);
  strange_detail::check_state_vector_cap(psi.n_qubits());
  return strange_detail::state_vector_expectation(to_dense(psi).vec(), psi.n_qubits(), ops);
}

// Heisenberg-picture channel: sum_k K^dag B K.
inline CMat adjoint_apply(const KrausChannel& ch, const CMat& b) {
  CMat out = CMat::Zero(b.rows(), b.cols());
  for (const auto& k : ch.operators) out += k.adjoint() * b * k;
  return out;
}

// Cluster-state geometries used for strange correlators.
struct ScGeometry {
  std::string kind;  // ring1d | chain1d | cylinder2d
  StabilizerState state;
  std::vector<int> sublattice;  // 0 = even site / vertex, 1 = odd site / edge
  std::size_t cells = 0, Lx = 0, Ly = 0;
  mutable std::shared_ptr<const CVec> amplitudes_;

  // 2L sites on a ring; both sublattices carry L sites.
  static ScGeometry ring_1d(std::size_t L) {
    if (L < 2) throw std::invalid_argument("ring needs at least two cells");
    const std::size_t n = 2 * L;
    std::vector<std::pair<std::size_t, std::size_t>> e;
    for (std::size_t i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
    ScGeometry g{"ring1d", StabilizerState::from_generators(graph_state_generators(n, e), n), {}, L, 0, 0, {}};
    for (std::size_t i = 0; i < n; ++i) g.sublattice.push_back(static_cast<int>(i % 2));
    return g;
  }
  static ScGeometry chain_1d(std::size_t N) {
    ScGeometry g{"chain1d", build_cluster_1d(N), {}, N, 0, 0, {}};
    for (std::size_t i = 0; i < 2 * N + 1; ++i) g.sublattice.push_back(Chain1D::sublattice(i));
    return g;
  }
  static ScGeometry cylinder_2d(std::size_t Lx, std::size_t Ly) {
    LiebCylinder2D l(Lx, Ly);
    ScGeometry g{"cylinder2d", build_cluster_2d(Lx, Ly), {}, 0, Lx, Ly, {}};
    for (std::size_t q = 0; q < l.n_qubits(); ++q) g.sublattice.push_back(l.is_vertex(q) ? 0 : 1);
    return g;
  }

  std::size_t n_qubits() const { return state.n_qubits(); }
  // State vector, built on first use.
  const CVec& amplitudes() const {
    if (!amplitudes_) {
      strange_detail::check_state_vector_cap(n_qubits());
      amplitudes_ = std::make_shared<const CVec>(to_dense(state).vec());
    }
    return *amplitudes_;
  }
  cplx expectation(std::span<const CMat> ops, ExpectationEngine engine) const {
    strange_detail::check_ops(n_qubits(), ops);
    if (engine == ExpectationEngine::stabilizer_sum) return strange_detail::stabilizer_sum_expectation(state, ops);
    return strange_detail::state_vector_expectation(amplitudes(), n_qubits(), ops);
  }
  std::size_t sites_on(int s) const { return static_cast<std::size_t>(std::count(sublattice.begin(), sublattice.end(), s)); }
};

inline std::vector<KrausChannel> site_channels(const ScGeometry& g, const ChannelSpec& spec) {
  std::vector<KrausChannel> ch;
  ch.reserve(g.n_qubits());
  for (int s : g.sublattice) ch.push_back(kraus_of(spec, s));
  return ch;
}

enum class ScKind { type_I, type_II };
enum class ScMethod { dense, stabilizer_sum, closed_form, ising_map };

inline const char* to_string(ScKind k) { return k == ScKind::type_I ? "I" : "II"; }
inline const char* to_string(ScMethod m) {
  switch (m) {
    case ScMethod::dense: return "dense";
    case ScMethod::stabilizer_sum: return "stabilizer_sum";
    case ScMethod::closed_form: return "closed_form";
    case ScMethod::ising_map: return "ising_map";
  }
  return "?";
}

struct DecayFit {
  double xi = 0, ci_low = 0, ci_high = 0;
  std::size_t n_points = 0;
};

struct StrangeCorrelatorReport {
  ScKind kind = ScKind::type_I;
  ScMethod method = ScMethod::dense;
  std::size_t i = 0, j = 0;
  double value = 0, stderr_ = 0;
  std::vector<double> values;       // per trajectory or per separation
  std::vector<double> separations;  // when values run over separations
  std::optional<DecayFit> decay;
  nlohmann::json params = nlohmann::json::object();
};

inline void to_json(nlohmann::json& j, const DecayFit& f) {
  j = {{"xi", f.xi}, {"ci_low", f.ci_low}, {"ci_high", f.ci_high}, {"n_points", f.n_points}};
}
inline void to_json(nlohmann::json& j, const StrangeCorrelatorReport& r) {
  j = {{"kind", to_string(r.kind)}, {"method", to_string(r.method)}, {"i", r.i}, {"j", r.j},
       {"value", r.value},          {"stderr", r.stderr_},           {"params", r.params}};
  if (!r.values.empty()) j["values"] = r.values;
  if (!r.separations.empty()) j["separations"] = r.separations;
  if (r.decay) j["decay"] = *r.decay;
}

namespace strange_detail {

inline void check_bounded(double v) {
  if (!(std::abs(v) <= 1 + 1e-9)) throw InvariantViolation("strange correlator exceeds 1 in magnitude: " + std::to_string(v));
}

inline ExpectationEngine engine_for(ScMethod m) {
  if (m == ScMethod::dense) return ExpectationEngine::state_vector;
  if (m == ScMethod::stabilizer_sum) return ExpectationEngine::stabilizer_sum;
  throw std::invalid_argument(std::string("method ") + to_string(m) + " is not an operator evaluation");
}

inline double ratio(cplx num, cplx den) {
  if (std::abs(den) < 1e-300) throw ZeroProbabilityBranch("reference state has zero overlap with the decohered state");
  cplx r = num / den;
  if (std::abs(r.imag()) > 1e-9 * std::max(1.0, std::abs(r.real())))
    throw InvariantViolation("strange correlator has an imaginary part");
  return r.real();
}

// E*[X] = b X + c I on one site; throws when the image leaves span{I, X}.
inline std::pair<double, double> x_image(const KrausChannel& ch) {
  auto co = pauli_coefficients(adjoint_apply(ch, pauli_matrix('X')));
  auto ci = pauli_coefficients(adjoint_apply(ch, CMat::Identity(2, 2)));
  if (std::abs(co[2]) > 1e-12 || std::abs(co[3]) > 1e-12 || std::abs(co[0].imag()) > 1e-12 ||
      std::abs(co[1].imag()) > 1e-12)
    throw UnsupportedClosedForm("channel adjoint does not keep X within span{I, X}");
  if (std::abs(ci[0] - 1.0) > 1e-12) throw UnsupportedClosedForm("channel is not trace preserving");
  return {co[1].real(), co[0].real()};
}

}  // namespace strange_detail

// Tr(E[rho] Z_i Z_j rho0 Z_j Z_i) / Tr(E[rho] rho0) with rho0 = |+><+|^n.
inline StrangeCorrelatorReport type2_sc(const ScGeometry& g, const ChannelSpec& spec, std::size_t i, std::size_t j,
                                        ScMethod method) {
  const std::size_t n = g.n_qubits();
  if (i >= n || j >= n) throw std::out_of_range("site index out of range");
  StrangeCorrelatorReport rep;
  rep.kind = ScKind::type_II;
  rep.method = method;
  rep.i = i;
  rep.j = j;
  rep.params = {{"geometry", g.kind}, {"channel", spec}};
  auto chans = site_channels(g, spec);
  if (method == ScMethod::closed_form) {
    if (g.kind != "ring1d") throw UnsupportedClosedForm("closed form derived for the 1D ring only");
    // Only I, X_A, X_B and X_A X_B survive on the ring, so the ratio factorizes per sublattice.
    double sc = 1;
    for (int s : {0, 1}) {
      std::size_t site = 0;
      while (g.sublattice[site] != s) ++site;
      auto [b, c] = strange_detail::x_image(chans[site]);
      int charged = 0;
      if (i != j) charged = (g.sublattice[i] == s) + (g.sublattice[j] == s);
      const double L = static_cast<double>(g.sites_on(s));
      double num = std::pow(1 + c, L - charged) * std::pow(1 - c, charged) + std::pow(-1.0, charged) * std::pow(b, L);
      double den = std::pow(1 + c, L) + std::pow(b, L);
      sc *= num / den;
    }
    rep.value = sc;
  } else {
    auto engine = strange_detail::engine_for(method);
    std::vector<CMat> num, den;
    for (std::size_t q = 0; q < n; ++q) {
      int sign = (i != j && (q == i || q == j)) ? -1 : 1;
      num.push_back(adjoint_apply(chans[q], strange_detail::x_projector(sign)));
      den.push_back(adjoint_apply(chans[q], strange_detail::x_projector(1)));
    }
    rep.value = strange_detail::ratio(g.expectation(num, engine), g.expectation(den, engine));
  }
  strange_detail::check_bounded(rep.value);
  return rep;
}

// Tr(E[rho] Z_i Z_j P_m) / Tr(E[rho] P_m), P_m the X-basis projector onto outcomes m on
// every site other than i and j (entries at i and j are ignored).
inline StrangeCorrelatorReport type1_sc(const ScGeometry& g, const ChannelSpec& spec, std::span<const int> m,
                                        std::size_t i, std::size_t j, ScMethod method) {
  const std::size_t n = g.n_qubits();
  if (i >= n || j >= n || i == j) throw std::out_of_range("need two distinct sites in range");
  if (m.size() != n) throw SizeMismatch("trajectory must list one outcome per qubit");
  StrangeCorrelatorReport rep;
  rep.kind = ScKind::type_I;
  rep.method = method;
  rep.i = i;
  rep.j = j;
  rep.params = {{"geometry", g.kind}, {"channel", spec}};
  if (method == ScMethod::closed_form) throw UnsupportedClosedForm("no closed form for type-I correlators");
  if (method == ScMethod::ising_map) {
    if (g.kind != "cylinder2d" || spec.kind != ChannelKind::z_dephase || spec.p_a != 0)
      throw std::invalid_argument("Ising map needs Z-dephasing on the edges of the 2D cylinder only");
    LiebCylinder2D l(g.Lx, g.Ly);
    if (!l.is_vertex(i) || !l.is_vertex(j)) throw std::invalid_argument("Ising map correlates vertex sites");
    IsingLattice lat(g.Lx, g.Ly);
    std::vector<int> bonds(lat.n_bonds());
    for (std::size_t b = 0; b < bonds.size(); ++b) {
      int v = m[l.n_vertices() + b];
      if (v != 1 && v != -1) throw std::invalid_argument("edge outcomes must be +-1");
      bonds[b] = v;
    }
    auto in = RBIMInstance::nishimori(lat, std::move(bonds), spec.p_b);
    auto method_sm = g.Ly <= kTransferMaxWidth ? CorrelationMethod::transfer_matrix : CorrelationMethod::metropolis;
    auto est = correlation(in, i, j, method_sm);
    rep.value = est.value;
    rep.stderr_ = est.stderr_;
    rep.params["beta"] = in.beta;
    rep.params["statmech"] = to_string(method_sm);
  } else {
    auto engine = strange_detail::engine_for(method);
    auto chans = site_channels(g, spec);
    std::vector<CMat> num, den;
    for (std::size_t q = 0; q < n; ++q) {
      if (q == i || q == j) {
        num.push_back(adjoint_apply(chans[q], pauli_matrix('Z')));
        den.push_back(CMat::Identity(2, 2));
        continue;
      }
      if (m[q] != 1 && m[q] != -1) throw std::invalid_argument("outcomes must be +-1");
      CMat pr = adjoint_apply(chans[q], strange_detail::x_projector(m[q]));
      num.push_back(pr);
      den.push_back(pr);
    }
    rep.value = strange_detail::ratio(g.expectation(num, engine), g.expectation(den, engine));
  }
  strange_detail::check_bounded(rep.value);
  return rep;
}

// Type-I correlator of the perturbed 2D model: Ising correlation with couplings
// atanh[(tanh l + (1-2p) m)/(1 + tanh l (1-2p) m)] on the edge outcomes m.
inline StrangeCorrelatorReport perturbed_type1_sc(const ScGeometry& g, double p, double lambda, std::span<const int> m,
                                                  std::size_t i, std::size_t j,
                                                  std::optional<CorrelationMethod> method = std::nullopt,
                                                  const MetropolisSchedule& sched = {}) {
  if (g.kind != "cylinder2d") throw std::invalid_argument("perturbed model lives on the 2D cylinder");
  if (lambda < 0) throw std::invalid_argument("perturbation must be non-negative");
  LiebCylinder2D l(g.Lx, g.Ly);
  if (m.size() != l.n_qubits()) throw SizeMismatch("trajectory must list one outcome per qubit");
  if (!l.is_vertex(i) || !l.is_vertex(j) || i == j) throw std::invalid_argument("need two distinct vertex sites");
  IsingLattice lat(g.Lx, g.Ly);
  std::vector<int> bonds(m.begin() + static_cast<std::ptrdiff_t>(l.n_vertices()), m.end());
  auto in = RBIMInstance::nishimori(lat, std::move(bonds), p, lambda);
  auto method_sm = method.value_or(g.Ly <= kTransferMaxWidth ? CorrelationMethod::transfer_matrix
                                                             : CorrelationMethod::metropolis);
  auto est = correlation(in, i, j, method_sm, sched);
  StrangeCorrelatorReport rep;
  rep.kind = ScKind::type_I;
  rep.method = ScMethod::ising_map;
  rep.i = i;
  rep.j = j;
  rep.value = est.value;
  rep.stderr_ = est.stderr_;
  rep.params = {{"geometry", g.kind}, {"p", p}, {"lambda", lambda}, {"statmech", to_string(method_sm)}};
  strange_detail::check_bounded(rep.value);
  return rep;
}

// Born-rule X outcomes on every site except the excluded ones, for Pauli dephasing channels
// (a Z or Y error before an X measurement flips the outcome). Excluded entries are 0.
inline std::vector<int> sample_trajectory(const ScGeometry& g, const ChannelSpec& spec,
                                          std::span<const std::size_t> excluded, Rng& rng) {
  if (!spec.is_dephasing()) throw NotPauliChannel("trajectory sampling needs a dephasing channel");
  spec.validate();
  const std::size_t n = g.n_qubits();
  std::vector<char> skip(n, 0);
  for (auto q : excluded) skip.at(q) = 1;
  StabilizerState s = g.state;
  std::vector<int> m(n, 0);
  for (std::size_t q = 0; q < n; ++q) {
    if (skip[q]) continue;
    int out = s.measure(PauliString::single(n, q, 'X'), rng).outcome;
    if (rng.bernoulli(spec.strength(g.sublattice[q]))) out = -out;
    m[q] = out;
  }
  return m;
}

// Least squares on log|SC| against separation; points at the noise floor are dropped.
inline DecayFit fit_decay_length(std::span<const double> separation, std::span<const double> values) {
  if (separation.size() != values.size()) throw SizeMismatch("separations and values differ in length");
  std::vector<double> x, y;
  for (std::size_t k = 0; k < values.size(); ++k)
    if (std::abs(values[k]) > 10 * std::numeric_limits<double>::epsilon()) {
      x.push_back(separation[k]);
      y.push_back(std::log(std::abs(values[k])));
    }
  if (x.size() < 2) throw std::invalid_argument("decay fit needs two resolvable points");
  auto f = fit_line(x, y);
  if (!(f.slope < 0)) throw std::domain_error("correlator does not decay");
  DecayFit d;
  d.xi = -1 / f.slope;
  double lo = f.slope - 1.96 * f.slope_stderr, hi = f.slope + 1.96 * f.slope_stderr;
  d.ci_low = -1 / lo;
  d.ci_high = hi < 0 ? -1 / hi : std::numeric_limits<double>::infinity();
  d.n_points = x.size();
  return d;
}

// Type-I correlator between site 0 and site 2n of an open chain, n = 1..max_sep, for one
// Born trajectory of the given dephasing channel; fits the decay length.
inline StrangeCorrelatorReport type1_decay_1d(std::size_t N, const ChannelSpec& spec, std::size_t max_sep, Rng& rng,
                                              ScMethod method = ScMethod::dense) {
  if (max_sep < 2 || max_sep > N) throw std::invalid_argument("separations must run from 1 to at most N (>= 2)");
  auto g = ScGeometry::chain_1d(N);
  StrangeCorrelatorReport rep;
  rep.kind = ScKind::type_I;
  rep.method = method;
  rep.params = {{"geometry", g.kind}, {"channel", spec}, {"N", N}};
  for (std::size_t s = 1; s <= max_sep; ++s) {
    const std::size_t ends[2] = {0, 2 * s};
    auto m = sample_trajectory(g, spec, ends, rng);
    rep.values.push_back(type1_sc(g, spec, m, 0, 2 * s, method).value);
    rep.separations.push_back(static_cast<double>(s));
  }
  rep.j = 2 * max_sep;
  rep.value = rep.values.back();
  rep.decay = fit_decay_length(rep.separations, rep.values);
  return rep;
}

// Charge-sector data for one trajectory: the (i, j) state conditioned on outcomes m, in the
// X basis |x_i x_j>, split by the charge x_i x_j.
struct TrajectoryBlock {
  double weight = 1;                         // Born weight, normalized over the list by ic_from_sc
  std::array<double, 2> sector_prob{};       // charge +1, -1
  std::array<double, 2> sector_sc{};         // off-diagonal ratio within each sector
  std::array<double, 2> diagonal_gap{};      // |rho_aa - rho_bb| / sector weight
  std::optional<CMat> dense;                 // normalized 4x4, basis index xi_bit | xj_bit << 1 (bit 1 = minus)
};

// Rebuild rho_{ij | m} from single-site operators |b><a| and collect the sector data.
// Sites listed in noiseless skip the channel. The weight is the unnormalized Born weight.
inline TrajectoryBlock trajectory_block(const ScGeometry& g, const ChannelSpec& spec, std::span<const int> m,
                                        std::size_t i, std::size_t j, ScMethod method = ScMethod::dense,
                                        std::span<const std::size_t> noiseless = {}) {
  const std::size_t n = g.n_qubits();
  if (i >= n || j >= n || i == j) throw std::out_of_range("need two distinct sites in range");
  if (m.size() != n) throw SizeMismatch("trajectory must list one outcome per qubit");
  auto engine = strange_detail::engine_for(method);
  auto chans = site_channels(g, spec);
  for (auto q : noiseless) chans.at(q).operators = {CMat::Identity(2, 2)};
  std::vector<CMat> ops(n);
  for (std::size_t q = 0; q < n; ++q)
    if (q != i && q != j) {
      if (m[q] != 1 && m[q] != -1) throw std::invalid_argument("outcomes must be +-1");
      ops[q] = adjoint_apply(chans[q], strange_detail::x_projector(m[q]));
    }
  CVec plus(2), minus(2);
  plus << M_SQRT1_2, M_SQRT1_2;
  minus << M_SQRT1_2, -M_SQRT1_2;
  const CVec xb[2] = {plus, minus};
  CMat rho = CMat::Zero(4, 4);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      // <a| rho |b> = Tr(rho |b><a|)
      ops[i] = adjoint_apply(chans[i], xb[b & 1] * xb[a & 1].adjoint());
      ops[j] = adjoint_apply(chans[j], xb[b >> 1] * xb[a >> 1].adjoint());
      rho(a, b) = g.expectation(ops, engine);
    }
  cplx tr = rho.trace();
  if (std::abs(tr) < 1e-300) throw ZeroProbabilityBranch("trajectory has zero probability");
  rho /= tr;
  TrajectoryBlock blk;
  blk.weight = tr.real();
  // Sector +1: {++, --} = {0, 3}; sector -1: {+-, -+} = {1, 2}.
  const int pairs[2][2] = {{0, 3}, {1, 2}};
  for (int s = 0; s < 2; ++s) {
    auto [a, b] = std::pair{pairs[s][0], pairs[s][1]};
    double w = rho(a, a).real() + rho(b, b).real();
    blk.sector_prob[s] = w;
    blk.sector_sc[s] = w > 1e-300 ? 2 * rho(a, b).real() / w : 0.0;
    blk.diagonal_gap[s] = w > 1e-300 ? std::abs(rho(a, a).real() - rho(b, b).real()) / w : 0.0;
  }
  blk.dense = rho;
  return blk;
}

// The 4x4 matrix implied by sector weights and correlators (equal diagonals within a sector).
inline CMat reconstruct_block(const TrajectoryBlock& blk) {
  CMat r = CMat::Zero(4, 4);
  const int pairs[2][2] = {{0, 3}, {1, 2}};
  for (int s = 0; s < 2; ++s) {
    int a = pairs[s][0], b = pairs[s][1];
    double w = blk.sector_prob[s];
    r(a, a) = r(b, b) = w / 2;
    r(a, b) = r(b, a) = w * blk.sector_sc[s] / 2;
  }
  return r;
}

struct IcFromScReport {
  double value = 0;
  std::size_t n_trajectories = 0, n_fallback = 0;
  bool fallback() const { return n_fallback > 0; }
};

// sum_m w_m [I_m(i:j) - S_m(i)], with I_m = 2 - sum_s p_s h2((1+|SC_s|)/2) - H(p_s) and S_m(i) = 1.
// Trajectories whose sector diagonals differ by more than 1e-6 use their dense block instead.
inline IcFromScReport ic_from_sc(std::span<const TrajectoryBlock> blocks) {
  IcFromScReport rep;
  double wsum = 0;
  for (const auto& b : blocks) wsum += b.weight;
  if (!(wsum > 0)) throw std::invalid_argument("trajectory weights must be positive");
  for (const auto& b : blocks) {
    double ps = b.sector_prob[0] + b.sector_prob[1];
    if (std::abs(ps - 1) > 1e-9 || b.sector_prob[0] < -1e-12 || b.sector_prob[1] < -1e-12)
      throw std::invalid_argument("sector probabilities must form a distribution");
    for (double sc : b.sector_sc)
      if (std::abs(sc) > 1 + 1e-9) throw std::invalid_argument("strange correlator exceeds 1 in magnitude");
    double contrib;
    bool unequal = std::max(b.diagonal_gap[0], b.diagonal_gap[1]) > 1e-6;
    if (unequal && b.dense) {
      const CMat& r = *b.dense;
      CMat ri = CMat::Zero(2, 2), rj = CMat::Zero(2, 2);
      for (int a = 0; a < 4; ++a)
        for (int c = 0; c < 4; ++c) {
          if ((a >> 1) == (c >> 1)) ri(a & 1, c & 1) += r(a, c);
          if ((a & 1) == (c & 1)) rj(a >> 1, c >> 1) += r(a, c);
        }
      contrib = von_neumann_bits(rj) - von_neumann_bits(r);
      ++rep.n_fallback;
    } else {
      double mi = 2 - shannon_bits(b.sector_prob);
      for (int s = 0; s < 2; ++s) mi -= b.sector_prob[s] * h2((1 + std::min(1.0, std::abs(b.sector_sc[s]))) / 2);
      contrib = mi - 1;
    }
    rep.value += b.weight / wsum * contrib;
    ++rep.n_trajectories;
  }
  return rep;
}

// Exact Born-weighted and i.i.d.-bond averages of the per-trajectory coherent information
// 1 - h2((1 + |<s_i s_j>|)/2) over every edge configuration of an Lx x Ly cylinder.
struct GaugeAverageCheck {
  double born = 0, iid = 0;
  std::size_t n_configs = 0;
};

inline GaugeAverageCheck gauge_average_check(std::size_t Lx, std::size_t Ly, double p, std::size_t i, std::size_t j) {
  IsingLattice lat(Lx, Ly);
  const std::size_t nb = lat.n_bonds();
  if (nb > 22) throw SizeCapExceeded("gauge average enumerates at most 2^22 bond configurations");
  std::vector<double> log_w, f, log_iid;
  const std::uint64_t total = std::uint64_t{1} << nb;
  std::vector<int> bonds(nb);
  for (std::uint64_t c = 0; c < total; ++c) {
    double li = 0;
    for (std::size_t b = 0; b < nb; ++b) {
      bonds[b] = ((c >> b) & 1u) ? -1 : 1;
      li += bonds[b] < 0 ? std::log(p) : std::log1p(-p);
    }
    TransferMatrix tm(RBIMInstance::nishimori(lat, bonds, p));
    auto [corr, lz] = tm.correlation(i, j);
    log_w.push_back(lz);
    log_iid.push_back(li);
    f.push_back(1 - h2((1 + std::min(1.0, std::abs(corr))) / 2));
  }
  double mx = *std::max_element(log_w.begin(), log_w.end());
  double zs = 0, born = 0, iid = 0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    double w = std::exp(log_w[k] - mx);
    zs += w;
    born += w * f[k];
    iid += std::exp(log_iid[k]) * f[k];
  }
  return {born / zs, iid, static_cast<std::size_t>(total)};
}

}  // namespace mixspt
