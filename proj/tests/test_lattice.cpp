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

#include <gtest/gtest.h>

#include <bit>

#include "mixspt/dense.hpp"
#include "mixspt/lattice.hpp"

using namespace mixspt;

namespace {

StabilizerState circuit_graph_state(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  auto s = StabilizerState::plus(n);
  for (auto [a, b] : edges) s.cz(a, b);
  return s;
}

bool same_state(const StabilizerState& a, const StabilizerState& b) {
  for (const auto& g : b.generators()) {
    auto s = a.group_sign(g);
    if (!s || *s != 1) return false;
  }
  return a.num_generators() == b.num_generators();
}

// Checks g|psi> = |psi> for the real graph-state amplitude psi(b) = (-1)^{#edges with both ends set},
// streaming over all basis states.
bool graph_amplitude_stabilized(const PauliString& g, const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                                std::size_t n) {
  std::vector<std::uint64_t> emask(n, 0);
  for (auto [a, b] : edges) {
    emask[a] |= std::uint64_t{1} << b;
    emask[b] |= std::uint64_t{1} << a;
  }
  // parity(b) built from parity(b without its lowest set bit).
  std::vector<std::uint8_t> parity(std::size_t{1} << n, 0);
  for (std::uint64_t b = 1; b < parity.size(); ++b) {
    std::uint64_t rest = b & (b - 1);
    parity[b] = parity[rest] ^ (std::popcount(emask[std::countr_zero(b)] & rest) & 1);
  }
  std::uint64_t xm = 0, zm = 0;
  int ny = 0;
  for (std::size_t q = 0; q < n; ++q) {
    if (g.x(q)) xm |= std::uint64_t{1} << q;
    if (g.z(q)) zm |= std::uint64_t{1} << q;
    if (g.x(q) && g.z(q)) ++ny;
  }
  // P|b> = i^{phase + ny} (-1)^{z.b} |b ^ x>; amplitudes are real so i-power must be even.
  unsigned ipow = (g.phase() + static_cast<unsigned>(ny)) & 3u;
  if (ipow & 1u) return false;
  int base = ipow == 2 ? 1 : 0;
  for (std::uint64_t b = 0; b < parity.size(); ++b) {
    int lhs = parity[b ^ xm];
    int rhs = (parity[b] + base + std::popcount(zm & b)) & 1;
    if (lhs != rhs) return false;
  }
  return true;
}

}  // namespace

TEST(Lattice, ChainBasics) {
  Chain1D c(3);
  EXPECT_EQ(c.n_sites(), 7u);
  EXPECT_EQ(Chain1D::sublattice(c.left()), 0);
  EXPECT_EQ(Chain1D::sublattice(c.right()), 0);
  EXPECT_THROW(Chain1D(0), std::invalid_argument);
}

TEST(Lattice, Cluster1dStabilizersAndStringOrder) {
  auto s = build_cluster_1d(1);
  EXPECT_EQ(s.group_sign(PauliString::parse("ZXZ")), 1);
  EXPECT_EQ(s.group_sign(PauliString::parse("XZ_")), 1);
  auto s2 = build_cluster_1d(2);
  // String order between the two boundary sites.
  EXPECT_EQ(s2.group_sign(PauliString::parse("ZX_XZ")), 1);
  EXPECT_EQ(s2.group_sign(PauliString::parse("X_X_X")), 1);
}

TEST(Lattice, Cluster1dMatchesDenseCircuit) {
  auto s = build_cluster_1d(2);
  auto d = DenseState::zeros(5);
  CMat h = (CMat(2, 2) << M_SQRT1_2, M_SQRT1_2, M_SQRT1_2, -M_SQRT1_2).finished();
  CMat cz = CMat::Identity(4, 4);
  cz(3, 3) = -1;
  for (std::size_t q = 0; q < 5; ++q) d.apply_unitary(h, {q});
  for (std::size_t q = 0; q < 4; ++q) d.apply_unitary(cz, {q, q + 1});
  EXPECT_NEAR(std::abs(to_dense(s).vec().dot(d.vec())), 1.0, 1e-12);
}

TEST(Lattice, SymmetryGeneratorsCommuteAndStabilize) {
  for (std::size_t N = 1; N <= 5; ++N) {
    Chain1D c(N);
    auto s = build_cluster_1d(N);
    for (const auto& g : symmetry_1d(c).generators) {
      for (const auto& k : s.generators()) EXPECT_TRUE(g.bare.commutes(k) || k.x(0) || k.x(c.right()));
      EXPECT_EQ(s.group_sign(g.dressed), 1) << g.label;
    }
  }
  LiebCylinder2D l(4, 3);
  auto s = build_cluster_2d(4, 3);
  for (const auto& g : symmetry_2d(l).generators) {
    for (const auto& k : s.generators()) EXPECT_TRUE(g.bare.commutes(k));
    EXPECT_EQ(s.group_sign(g.dressed), 1) << g.label;
  }
}

TEST(Lattice, CylinderIndexing) {
  LiebCylinder2D l(3, 4);
  EXPECT_EQ(l.n_qubits(), 12u + 8u + 12u);
  for (auto e : l.edges()) {
    auto ends = l.endpoints(e);
    EXPECT_NE(ends[0], ends[1]);
    EXPECT_TRUE(l.is_vertex(ends[0]) && l.is_vertex(ends[1]));
  }
  EXPECT_EQ(l.endpoints(l.vedge(1, 3))[1], l.vertex(1, 0));
  EXPECT_THROW(LiebCylinder2D(3, 2), std::invalid_argument);
  EXPECT_THROW(build_cluster_2d(2, 3), std::invalid_argument);
}

TEST(Lattice, MembraneStringAndPlaquetteConstraint) {
  LiebCylinder2D l(5, 4);
  auto s = build_cluster_2d(5, 4);
  const std::size_t n = l.n_qubits();
  // Membrane on vertex block {1,2} x {1,2}: boundary edges carry Z.
  PauliString m(n);
  std::vector<std::size_t> region = {l.vertex(1, 1), l.vertex(1, 2), l.vertex(2, 1), l.vertex(2, 2)};
  for (auto v : region) m.set(v, 'X');
  for (auto e : l.edges()) {
    auto ends = l.endpoints(e);
    int inside = 0;
    for (auto v : region) inside += (ends[0] == v) + (ends[1] == v);
    if (inside == 1) m.set(e, 'Z');
  }
  EXPECT_EQ(s.group_sign(m), 1);
  // String: Z at two vertices, X on the edges of a path joining them.
  PauliString str(n);
  str.set(l.vertex(1, 1), 'Z');
  str.set(l.hedge(1, 1), 'X');
  str.set(l.hedge(2, 1), 'X');
  str.set(l.vedge(3, 1), 'X');
  str.set(l.vertex(3, 2), 'Z');
  EXPECT_EQ(s.group_sign(str), 1);
  // Product of the four edge terms around a plaquette is the bare X loop.
  auto gens = graph_state_generators(n, graph_edges(l));
  for (std::size_t c = 0; c + 1 < l.Lx; ++c)
    for (std::size_t r = 0; r < l.Ly; ++r) {
      PauliString prod(n), loop(n);
      for (auto e : l.plaquette(c, r)) {
        prod *= gens[e];
        loop.set(e, 'X');
      }
      EXPECT_EQ(prod, loop);
    }
}

TEST(Lattice, Cluster2dMatchesCircuitAndStreamedAmplitudes) {
  LiebCylinder2D l(3, 3);
  auto edges = graph_edges(l);
  auto s = build_cluster_2d(3, 3);
  auto c = circuit_graph_state(l.n_qubits(), edges);
  EXPECT_TRUE(same_state(s, c));
  EXPECT_TRUE(same_state(c, s));
  // Spot-check a handful of generators against all 2^24 amplitudes.
  auto gens = s.generators();
  for (std::size_t i : {std::size_t{0}, std::size_t{10}, std::size_t{23}})
    EXPECT_TRUE(graph_amplitude_stabilized(gens[i], edges, l.n_qubits())) << i;
  auto bad = gens[0];
  bad.set(l.vertex(2, 2), 'Z');
  EXPECT_FALSE(graph_amplitude_stabilized(bad, edges, l.n_qubits()));
}

TEST(Lattice, AncillaEntanglement1d) {
  for (std::size_t N = 1; N <= 3; ++N) {
    Chain1D c(N);
    auto s = entangle_ancilla(build_cluster_1d(N), c, Side::left, AncillaCode::bell);
    const std::size_t a = c.n_sites();
    std::vector<std::size_t> rest;
    for (std::size_t q = 0; q < a; ++q) rest.push_back(q);
    std::vector<std::size_t> all = rest;
    all.push_back(a);
    double mi = s.entropy({a}) + s.entropy(rest) - s.entropy(all);
    EXPECT_DOUBLE_EQ(mi, 2.0);
    auto d = to_dense(s);
    EXPECT_NEAR(mutual_information(d, std::span<const std::size_t>(std::vector<std::size_t>{a}),
                                   std::span<const std::size_t>(rest)),
                2.0, 1e-10);
  }
  EXPECT_THROW(entangle_ancilla(build_cluster_1d(1), Chain1D(1), Side::left, AncillaCode::repetition),
               std::invalid_argument);
}

TEST(Lattice, AncillaEntanglement2d) {
  LiebCylinder2D l(3, 3);
  auto base = build_cluster_2d(3, 3);
  auto s = entangle_ancilla(base, l, Side::left, AncillaCode::repetition);
  const std::size_t n = l.n_qubits();
  auto lg = logical_2d(l);
  PauliString xx = extend(lg.left.x, n + 1), zz = extend(lg.left.z, n + 1);
  xx.set(n, 'X');
  zz.set(n, 'Z');
  EXPECT_EQ(s.group_sign(xx), 1);
  EXPECT_EQ(s.group_sign(zz), 1);
  // Without the ancilla the system sits maximally mixed on the logical qubit.
  std::vector<std::size_t> sys;
  for (std::size_t q = 0; q < n; ++q) sys.push_back(q);
  EXPECT_DOUBLE_EQ(s.entropy(sys), 1.0);
  for (auto p : {extend(lg.left.x, n + 1), extend(lg.left.z, n + 1)}) EXPECT_EQ(s.expectation(p), 0.0);
  // Logical pair: anticommute; commute with the bulk vertex charges away from the boundary.
  EXPECT_FALSE(lg.left.x.commutes(lg.left.z));
  EXPECT_FALSE(lg.right.x.commutes(lg.right.z));
  PauliString bulk(n);
  for (std::size_t r = 0; r < l.Ly; ++r) bulk.set(l.vertex(1, r), 'X');
  EXPECT_TRUE(bulk.commutes(lg.left.x));
  EXPECT_TRUE(bulk.commutes(lg.left.z));
  EXPECT_THROW(entangle_ancilla(base, l, Side::left, AncillaCode::bell), std::invalid_argument);
}

TEST(Lattice, ProtocolLayouts) {
  auto L1 = layout_1d(3);
  EXPECT_EQ(L1.measured.size(), 6u);
  EXPECT_EQ(L1.receiver, std::vector<std::size_t>{6});
  EXPECT_EQ(L1.state.n_qubits(), 8u);
  auto L2 = layout_2d(3, 3);
  EXPECT_EQ(L2.receiver.size(), 3u);
  EXPECT_EQ(L2.measured.size() + L2.receiver.size(), L2.n_system);
  // Boundary-column vertical edges noiseless by default.
  EXPECT_EQ(L2.decohered.size(), 6u + 3u);
  EXPECT_EQ(layout_2d(3, 3, true).decohered.size(), 6u + 9u);
}

TEST(Lattice, JsonSchema) {
  nlohmann::json j = LiebCylinder2D(4, 3);
  EXPECT_EQ(j["type"], "lieb_cylinder2d");
  EXPECT_EQ(j["n_qubits"], 12 + 9 + 12);
  nlohmann::json c = Chain1D(2);
  EXPECT_EQ(c["n_sites"], 5);
}
