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

#include <array>
#include <json.hpp>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mixspt/stabilizer.hpp"

namespace mixspt {

// Sites 0..2N, left to right. Even sites form sublattice A (holding both ends).
struct Chain1D {
  std::size_t N = 1;

  explicit Chain1D(std::size_t n_cells) : N(n_cells) {
    if (N < 1) throw std::invalid_argument("chain needs N >= 1");
  }
  std::size_t n_sites() const { return 2 * N + 1; }
  static int sublattice(std::size_t site) { return static_cast<int>(site % 2); }
  std::size_t left() const { return 0; }
  std::size_t right() const { return 2 * N; }
};

// Lieb lattice on a cylinder: vertex columns c = 0..Lx-1 (open), rings r = 0..Ly-1
// (periodic). Qubit order: vertices v(c,r) = c*Ly + r, then horizontal edges
// h(c,r) joining (c,r)-(c+1,r), then vertical edges u(c,r) joining (c,r)-(c,r+1).
struct LiebCylinder2D {
  std::size_t Lx = 3, Ly = 3;

  LiebCylinder2D(std::size_t lx, std::size_t ly) : Lx(lx), Ly(ly) {
    if (Lx < 2 || Ly < 3) throw std::invalid_argument("cylinder needs Lx >= 2 and Ly >= 3");
  }

  std::size_t n_vertices() const { return Lx * Ly; }
  std::size_t n_hedges() const { return (Lx - 1) * Ly; }
  std::size_t n_vedges() const { return Lx * Ly; }
  std::size_t n_qubits() const { return n_vertices() + n_hedges() + n_vedges(); }

  std::size_t vertex(std::size_t c, std::size_t r) const { return c * Ly + (r % Ly); }
  std::size_t hedge(std::size_t c, std::size_t r) const { return n_vertices() + c * Ly + (r % Ly); }
  std::size_t vedge(std::size_t c, std::size_t r) const { return n_vertices() + n_hedges() + c * Ly + (r % Ly); }

  bool is_vertex(std::size_t q) const { return q < n_vertices(); }
  bool is_vertical(std::size_t q) const { return q >= n_vertices() + n_hedges(); }
  // Column of a vertex or vertical edge, left column of a horizontal edge.
  std::size_t column(std::size_t q) const {
    if (is_vertex(q)) return q / Ly;
    if (is_vertical(q)) return (q - n_vertices() - n_hedges()) / Ly;
    return (q - n_vertices()) / Ly;
  }
  std::size_t ring(std::size_t q) const {
    if (is_vertex(q)) return q % Ly;
    if (is_vertical(q)) return (q - n_vertices() - n_hedges()) % Ly;
    return (q - n_vertices()) % Ly;
  }
  std::array<std::size_t, 2> endpoints(std::size_t e) const {
    std::size_t c = column(e), r = ring(e);
    if (is_vertical(e)) return {vertex(c, r), vertex(c, r + 1)};
    return {vertex(c, r), vertex(c + 1, r)};
  }
  std::vector<std::size_t> edges() const {
    std::vector<std::size_t> e;
    for (std::size_t q = n_vertices(); q < n_qubits(); ++q) e.push_back(q);
    return e;
  }
  // Plaquette (c,r), c < Lx-1: bottom h(c,r), top h(c,r+1), left u(c,r), right u(c+1,r).
  std::size_t n_plaquettes() const { return (Lx - 1) * Ly; }
  std::array<std::size_t, 4> plaquette(std::size_t c, std::size_t r) const {
    return {hedge(c, r), hedge(c, r + 1), vedge(c, r), vedge(c + 1, r)};
  }
  std::vector<std::size_t> column_vertices(std::size_t c) const {
    std::vector<std::size_t> v;
    for (std::size_t r = 0; r < Ly; ++r) v.push_back(vertex(c, r));
    return v;
  }
};

inline void to_json(nlohmann::json& j, const Chain1D& c) {
  j = {{"type", "chain1d"}, {"N", c.N}, {"n_sites", c.n_sites()}, {"left", c.left()}, {"right", c.right()},
       {"sublattice", "site parity (0 = even/A, 1 = odd/B)"}};
}
inline void to_json(nlohmann::json& j, const LiebCylinder2D& l) {
  j = {{"type", "lieb_cylinder2d"},
       {"Lx", l.Lx},
       {"Ly", l.Ly},
       {"n_qubits", l.n_qubits()},
       {"ordering", "vertex c*Ly+r; hedge Lx*Ly + c*Ly+r; vedge Lx*Ly+(Lx-1)*Ly + c*Ly+r"},
       {"left_column", 0},
       {"right_column", l.Lx - 1}};
}

// Graph state on |+>^n with CZ on each listed pair.
inline std::vector<PauliString> graph_state_generators(std::size_t n,
                                                       std::span<const std::pair<std::size_t, std::size_t>> edges) {
  std::vector<PauliString> g;
  g.reserve(n);
  for (std::size_t q = 0; q < n; ++q) g.push_back(PauliString::single(n, q, 'X'));
  for (auto [a, b] : edges) {
    if (a >= n || b >= n || a == b) throw std::invalid_argument("bad graph edge");
    g[a].set(b, 'Z');
    g[b].set(a, 'Z');
  }
  return g;
}

inline std::vector<std::pair<std::size_t, std::size_t>> graph_edges(const Chain1D& c) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 0; i + 1 < c.n_sites(); ++i) e.emplace_back(i, i + 1);
  return e;
}
inline std::vector<std::pair<std::size_t, std::size_t>> graph_edges(const LiebCylinder2D& l) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (auto q : l.edges()) {
    auto ends = l.endpoints(q);
    e.emplace_back(q, ends[0]);
    e.emplace_back(q, ends[1]);
  }
  return e;
}

inline StabilizerState build_cluster_1d(std::size_t N) {
  Chain1D c(N);
  auto e = graph_edges(c);
  return StabilizerState::from_generators(graph_state_generators(c.n_sites(), e), c.n_sites());
}

inline StabilizerState build_cluster_2d(std::size_t Lx, std::size_t Ly) {
  if (Lx < 3 || Ly < 3) throw std::invalid_argument("2D cluster needs Lx >= 3 and Ly >= 3");
  LiebCylinder2D l(Lx, Ly);
  auto e = graph_edges(l);
  return StabilizerState::from_generators(graph_state_generators(l.n_qubits(), e), l.n_qubits());
}

struct SymmetryGenerator {
  std::string label;
  PauliString bare;     // product of X over the charge set
  PauliString dressed;  // boundary-completed form that stabilizes the open-boundary state
};

struct SymmetrySpec {
  std::vector<SymmetryGenerator> generators;
};

struct LogicalPair {
  PauliString x;  // element of the stabilizer group
  PauliString z;  // anticommutes with x
};

struct LogicalSpec {
  LogicalPair left, right;
};

inline SymmetrySpec symmetry_1d(const Chain1D& c) {
  const std::size_t n = c.n_sites();
  PauliString even(n), odd(n);
  for (std::size_t i = 0; i < n; ++i) (i % 2 ? odd : even).set(i, 'X');
  PauliString odd_d = odd;
  odd_d.set(c.left(), 'Z');
  odd_d.set(c.right(), 'Z');
  return {{{"G_even", even, even}, {"G_odd", odd, odd_d}}};
}

inline SymmetrySpec symmetry_2d(const LiebCylinder2D& l) {
  const std::size_t n = l.n_qubits();
  SymmetrySpec s;
  PauliString gv(n);
  for (std::size_t v = 0; v < l.n_vertices(); ++v) gv.set(v, 'X');
  s.generators.push_back({"G_V", gv, gv});
  for (std::size_t c = 0; c + 1 < l.Lx; ++c)
    for (std::size_t r = 0; r < l.Ly; ++r) {
      PauliString p(n);
      for (auto e : l.plaquette(c, r)) p.set(e, 'X');
      s.generators.push_back({"loop_p" + std::to_string(c) + "_" + std::to_string(r), p, p});
    }
  for (std::size_t c = 0; c < l.Lx; ++c) {
    PauliString p(n);
    for (std::size_t r = 0; r < l.Ly; ++r) p.set(l.vedge(c, r), 'X');
    s.generators.push_back({"loop_col" + std::to_string(c), p, p});
  }
  return s;
}

inline LogicalSpec logical_1d(const Chain1D& c) {
  const std::size_t n = c.n_sites();
  PauliString xl(n), zl(n), xr(n), zr(n);
  xl.set(0, 'X');
  xl.set(1, 'Z');
  zl.set(0, 'Z');
  xr.set(n - 1, 'X');
  xr.set(n - 2, 'Z');
  zr.set(n - 1, 'Z');
  return {{xl, zl}, {xr, zr}};
}

// Boundary-column repetition code: X-bar is the product of the column's vertex
// stabilizers, Z-bar a single vertex Z.
inline LogicalSpec logical_2d(const LiebCylinder2D& l) {
  const std::size_t n = l.n_qubits();
  PauliString xl(n), zl(n), xr(n), zr(n);
  for (std::size_t r = 0; r < l.Ly; ++r) {
    xl.set(l.vertex(0, r), 'X');
    xl.set(l.hedge(0, r), 'Z');
    xr.set(l.vertex(l.Lx - 1, r), 'X');
    xr.set(l.hedge(l.Lx - 2, r), 'Z');
  }
  zl.set(l.vertex(0, 0), 'Z');
  zr.set(l.vertex(l.Lx - 1, 0), 'Z');
  return {{xl, zl}, {xr, zr}};
}

inline PauliString extend(const PauliString& p, std::size_t n_new) {
  if (n_new < p.n_qubits()) throw SizeMismatch("cannot shrink a Pauli");
  PauliString r(n_new);
  for (std::size_t q = 0; q < p.n_qubits(); ++q) r.set(q, p.at(q));
  r.set_phase(p.phase());
  return r;
}

// Append one ancilla (index n) maximally entangled with the logical pair.
inline StabilizerState entangle_ancilla(const StabilizerState& s, const LogicalPair& lp) {
  const std::size_t n = s.n_qubits();
  if (!s.is_pure()) throw std::invalid_argument("ancilla entangling needs a pure state");
  if (lp.x.commutes(lp.z)) throw std::invalid_argument("logical pair must anticommute");
  auto sx = s.group_sign(lp.x);
  if (!sx || *sx != 1) throw std::invalid_argument("logical X must stabilize the state");
  auto gens = s.generators();
  std::vector<PauliString> kept;
  std::size_t pivot = gens.size();
  for (std::size_t i = 0; i < gens.size(); ++i) {
    if (gens[i].commutes(lp.z)) continue;
    if (pivot == gens.size()) pivot = i;
    else gens[i] *= gens[pivot];
  }
  for (std::size_t i = 0; i < gens.size(); ++i)
    if (i != pivot) kept.push_back(extend(gens[i], n + 1));
  PauliString xa = extend(lp.x, n + 1);
  xa.set(n, 'X');
  PauliString za = extend(lp.z, n + 1);
  za.set(n, 'Z');
  kept.push_back(xa);
  kept.push_back(za);
  return StabilizerState::from_generators(kept, n + 1);
}

enum class Side { left, right };
enum class AncillaCode { bell, repetition };

inline StabilizerState entangle_ancilla(const StabilizerState& s, const Chain1D& c, Side side, AncillaCode code) {
  if (code != AncillaCode::bell) throw std::invalid_argument("1D chain supports the bell ancilla code only");
  auto lg = logical_1d(c);
  return entangle_ancilla(s, side == Side::left ? lg.left : lg.right);
}
inline StabilizerState entangle_ancilla(const StabilizerState& s, const LiebCylinder2D& l, Side side,
                                        AncillaCode code) {
  if (code != AncillaCode::repetition) throw std::invalid_argument("2D cylinder supports the repetition ancilla code only");
  auto lg = logical_2d(l);
  return entangle_ancilla(s, side == Side::left ? lg.left : lg.right);
}

// Everything the protocol needs: state with the sender ancilla, which qubits are
// measured in X, which form the receiver, and how outcomes combine into charges.
struct ProtocolLayout {
  std::string kind;  // chain1d | cylinder2d | product
  StabilizerState state;
  std::size_t n_system = 0;
  std::size_t ancilla = 0;
  std::vector<std::size_t> measured;
  std::vector<std::size_t> receiver;
  std::vector<int> sublattice;  // per system qubit: 0 = even site / vertex, 1 = odd site / edge
  std::vector<std::size_t> decohered;  // default noisy set
  std::vector<std::pair<std::string, std::vector<std::size_t>>> charges;
  nlohmann::json lattice;
  std::size_t N = 0, Lx = 0, Ly = 0;
};

inline ProtocolLayout layout_1d(std::size_t N) {
  Chain1D c(N);
  ProtocolLayout L;
  L.kind = "chain1d";
  L.N = N;
  L.n_system = c.n_sites();
  L.state = entangle_ancilla(build_cluster_1d(N), c, Side::left, AncillaCode::bell);
  L.ancilla = c.n_sites();
  std::vector<std::size_t> even, odd;
  for (std::size_t i = 0; i < c.right(); ++i) {
    L.measured.push_back(i);
    (i % 2 ? odd : even).push_back(i);
  }
  L.receiver = {c.right()};
  for (std::size_t i = 0; i < c.n_sites(); ++i) L.sublattice.push_back(Chain1D::sublattice(i));
  L.decohered = L.measured;
  L.charges = {{"gamma_even", even}, {"gamma_odd", odd}};
  L.lattice = c;
  return L;
}

// Boundary-column vertical edges stay noiseless unless noisy_boundary is set.
inline ProtocolLayout layout_2d(std::size_t Lx, std::size_t Ly, bool noisy_boundary = false) {
  LiebCylinder2D l(Lx, Ly);
  ProtocolLayout L;
  L.kind = "cylinder2d";
  L.Lx = Lx;
  L.Ly = Ly;
  L.n_system = l.n_qubits();
  L.state = entangle_ancilla(build_cluster_2d(Lx, Ly), l, Side::left, AncillaCode::repetition);
  L.ancilla = l.n_qubits();
  std::vector<std::size_t> verts, line;
  for (std::size_t q = 0; q < l.n_qubits(); ++q) {
    bool right_vertex = l.is_vertex(q) && l.column(q) == Lx - 1;
    if (right_vertex) {
      L.receiver.push_back(q);
    } else {
      L.measured.push_back(q);
      if (l.is_vertex(q)) verts.push_back(q);
    }
    L.sublattice.push_back(l.is_vertex(q) ? 0 : 1);
    if (!l.is_vertex(q)) {
      bool boundary_vertical = l.is_vertical(q) && (l.column(q) == 0 || l.column(q) == Lx - 1);
      if (!boundary_vertical || noisy_boundary) L.decohered.push_back(q);
    }
  }
  for (std::size_t c = 0; c + 1 < Lx; ++c) line.push_back(l.hedge(c, 0));
  L.charges = {{"gamma_V", verts}, {"gamma_line", line}};
  L.lattice = l;
  return L;
}

// |+>^n with the ancilla paired to site 0 (measured), receiver = last site.
inline ProtocolLayout layout_product(std::size_t n) {
  if (n < 2) throw std::invalid_argument("product layout needs two sites");
  ProtocolLayout L;
  L.kind = "product";
  L.n_system = n;
  auto s = StabilizerState::plus(n);
  L.state = entangle_ancilla(s, LogicalPair{PauliString::single(n, 0, 'X'), PauliString::single(n, 0, 'Z')});
  L.ancilla = n;
  for (std::size_t i = 0; i + 1 < n; ++i) L.measured.push_back(i);
  L.receiver = {n - 1};
  L.sublattice.assign(n, 0);
  L.decohered = L.measured;
  L.lattice = {{"type", "product"}, {"n_sites", n}};
  return L;
}

}  // namespace mixspt
