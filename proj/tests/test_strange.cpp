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

#include "mixspt/protocol.hpp"
#include "mixspt/strange.hpp"

using namespace mixspt;

namespace {

CMat random_op(Rng& rng) {
  CMat a(2, 2);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) a(r, c) = cplx(rng.uniform() - 0.5, rng.uniform() - 0.5);
  return a;
}

// E[|psi><psi|] as a dense density matrix, channel applied site by site.
CMat decohered_density(const ScGeometry& g, const ChannelSpec& spec) {
  DenseState s = to_dense(g.state).to_mixed();
  auto ch = site_channels(g, spec);
  for (std::size_t q = 0; q < g.n_qubits(); ++q) s = s.apply_channel(ch[q], {q});
  return s.density();
}

CMat kron_all(const std::vector<CMat>& ops) {
  CMat m = CMat::Identity(1, 1);
  for (const auto& a : ops) m = kron_low_first(m, a);
  return m;
}

CMat xproj(int s) { return 0.5 * (CMat::Identity(2, 2) + s * pauli_matrix('X')); }

double area_law(double q, double phi, double L) {
  double s = std::sin(2 * phi);
  return (std::pow(1 + q * s, L - 2) * std::pow(1 - q * s, 2) + std::pow(1 - q, L)) /
         (std::pow(1 + q * s, L) + std::pow(1 - q, L));
}

}  // namespace

TEST(ProductExpectation, EnginesAgreeOnGenericOperators) {
  Rng rng(5);
  for (const auto& g : {ScGeometry::chain_1d(3), ScGeometry::ring_1d(4)}) {
    for (int t = 0; t < 5; ++t) {
      std::vector<CMat> ops;
      for (std::size_t q = 0; q < g.n_qubits(); ++q) ops.push_back(random_op(rng));
      cplx a = product_expectation(g.state, ops, ExpectationEngine::state_vector);
      cplx b = product_expectation(g.state, ops, ExpectationEngine::stabilizer_sum);
      EXPECT_LT(std::abs(a - b), 1e-12) << g.kind;
      CVec v = to_dense(g.state).vec();
      cplx c = v.dot(kron_all(ops) * v);
      EXPECT_LT(std::abs(a - c), 1e-12);
    }
  }
}

TEST(ProductExpectation, ProjectorsAndErrors) {
  auto g = ScGeometry::ring_1d(3);
  std::vector<CMat> ops(g.n_qubits(), xproj(1));
  // Only I, X_A, X_B, X_A X_B survive: 4 / 2^6.
  EXPECT_NEAR(product_expectation(g.state, ops, ExpectationEngine::stabilizer_sum).real(), 4.0 / 64, 1e-15);
  ops.pop_back();
  EXPECT_THROW(product_expectation(g.state, ops, ExpectationEngine::stabilizer_sum), SizeMismatch);
  auto big = ScGeometry::cylinder_2d(4, 4);
  std::vector<CMat> generic(big.n_qubits(), CMat::Identity(2, 2) + pauli_matrix('Z') + pauli_matrix('X'));
  EXPECT_THROW(product_expectation(big.state, generic, ExpectationEngine::state_vector), SizeCapExceeded);
  EXPECT_THROW(product_expectation(big.state, generic, ExpectationEngine::stabilizer_sum), SizeCapExceeded);
}

TEST(TypeII, CleanSublatticeChargesGiveOne) {
  auto g = ScGeometry::ring_1d(6);
  auto spec = ChannelSpec::sdc(0.4, 0.3, 0.7, SublatticeMask::a);
  for (std::size_t j : {3, 5, 7, 11}) {
    EXPECT_NEAR(type2_sc(g, spec, 1, j, ScMethod::dense).value, 1.0, 1e-10) << j;
    EXPECT_NEAR(type2_sc(g, spec, 1, j, ScMethod::closed_form).value, 1.0, 1e-15);
  }
}

TEST(TypeII, DecoheredSublatticeAreaLaw) {
  auto g = ScGeometry::ring_1d(6);
  for (auto [q, phi] : {std::pair{0.7, 0.3}, {0.3, 1.1}, {1.0, 0.6}}) {
    auto spec = ChannelSpec::sdc(0.4, phi, q, SublatticeMask::a);
    const double golden = area_law(q, phi, 6);
    for (std::size_t j : {2, 4, 6, 10}) {
      double dense = type2_sc(g, spec, 0, j, ScMethod::dense).value;
      double closed = type2_sc(g, spec, 0, j, ScMethod::closed_form).value;
      EXPECT_NEAR(dense, golden, 1e-10) << q << " " << phi << " " << j;
      EXPECT_NEAR(closed, golden, 1e-12);
      EXPECT_NEAR(type2_sc(g, spec, 0, j, ScMethod::stabilizer_sum).value, dense, 1e-12);
    }
  }
  auto flat = ChannelSpec::sdc(0.4, 0.0, 0.8, SublatticeMask::a);
  EXPECT_EQ(area_law(0.8, 0.0, 6), 1.0);
  EXPECT_NEAR(type2_sc(g, flat, 0, 4, ScMethod::dense).value, 1.0, 1e-10);
}

TEST(TypeII, MatchesFullDensityMatrix) {
  auto g = ScGeometry::ring_1d(4);
  for (const auto& spec : {ChannelSpec::sdc(0.5, 0.2, 0.6, SublatticeMask::a), ChannelSpec::z_dephase(0.15, 0.3),
                           ChannelSpec::controlled_hadamard(0.7, SublatticeMask::b)}) {
    CMat rho = decohered_density(g, spec);
    std::vector<CMat> r0(g.n_qubits(), xproj(1)), r1 = r0;
    r1[0] = xproj(-1);
    r1[3] = xproj(-1);
    double want = (rho * kron_all(r1)).trace().real() / (rho * kron_all(r0)).trace().real();
    EXPECT_NEAR(type2_sc(g, spec, 0, 3, ScMethod::dense).value, want, 1e-12) << to_string(spec.kind);
  }
}

TEST(TypeII, ClosedFormCoversDephasingAndRejectsOthers) {
  auto g = ScGeometry::ring_1d(5);
  auto zd = ChannelSpec::z_dephase(0.2, 0.1);
  EXPECT_NEAR(type2_sc(g, zd, 0, 4, ScMethod::closed_form).value, type2_sc(g, zd, 0, 4, ScMethod::dense).value, 1e-12);
  EXPECT_NEAR(type2_sc(g, zd, 0, 3, ScMethod::closed_form).value, type2_sc(g, zd, 0, 3, ScMethod::dense).value, 1e-12);
  EXPECT_THROW(type2_sc(g, ChannelSpec::controlled_hadamard(0.5, SublatticeMask::a), 0, 2, ScMethod::closed_form),
               UnsupportedClosedForm);
  EXPECT_THROW(type2_sc(ScGeometry::chain_1d(3), zd, 0, 2, ScMethod::closed_form), UnsupportedClosedForm);
}

TEST(TypeII, DecomposableChannelsLeaveCleanChargesAtOne) {
  auto g = ScGeometry::ring_1d(5);
  for (const auto& spec : {ChannelSpec::z_dephase(0.3, 0), ChannelSpec::y_dephase(0.2, 0), ChannelSpec::swap(SublatticeMask::a),
                           ChannelSpec::sdc(1.0, 0.4, 0.5, SublatticeMask::a)})
    EXPECT_NEAR(type2_sc(g, spec, 1, 5, ScMethod::dense).value, 1.0, 1e-10) << to_string(spec.kind);
}

TEST(TypeI, PureStateIsMaximal) {
  auto g = ScGeometry::chain_1d(4);
  auto clean = ChannelSpec::z_dephase(0, 0);
  Rng rng(3);
  std::vector<int> plus(g.n_qubits(), 1);
  EXPECT_NEAR(type1_sc(g, clean, plus, 0, 8, ScMethod::dense).value, 1.0, 1e-12);
  for (int t = 0; t < 5; ++t) {
    const std::size_t ends[2] = {0, 8};
    auto m = sample_trajectory(g, clean, ends, rng);
    EXPECT_NEAR(std::abs(type1_sc(g, clean, m, 0, 8, ScMethod::dense).value), 1.0, 1e-12);
  }
}

TEST(TypeI, ChainDecaysGeometrically) {
  auto g = ScGeometry::chain_1d(5);
  const double p = 0.15;
  auto spec = ChannelSpec::z_dephase(0, p);
  Rng rng(8);
  for (std::size_t n = 1; n <= 5; ++n) {
    const std::size_t ends[2] = {0, 2 * n};
    auto m = sample_trajectory(g, spec, ends, rng);
    double v = type1_sc(g, spec, m, 0, 2 * n, ScMethod::dense).value;
    EXPECT_NEAR(std::abs(v), std::pow(1 - 2 * p, n), 1e-12) << n;
    EXPECT_NEAR(type1_sc(g, spec, m, 0, 2 * n, ScMethod::stabilizer_sum).value, v, 1e-12);
  }
}

TEST(TypeI, DecayLengthFit) {
  for (double p : {0.05, 0.1, 0.2}) {
    Rng rng(static_cast<std::uint64_t>(p * 1000));
    auto rep = type1_decay_1d(8, ChannelSpec::z_dephase(0, p), 8, rng);
    ASSERT_TRUE(rep.decay);
    const double xi = 1 / std::log(1 / (1 - 2 * p));
    EXPECT_LT(std::abs(rep.decay->xi - xi), 0.05 * xi) << p;
    EXPECT_EQ(rep.decay->n_points, 8u);
  }
  EXPECT_THROW(fit_decay_length(std::vector<double>{1, 2}, std::vector<double>{0.5, 0.0}), std::invalid_argument);
}

TEST(TypeI, IsingMapEqualsStabilizerSumOn4x4) {
  auto g = ScGeometry::cylinder_2d(4, 4);
  LiebCylinder2D l(4, 4);
  const std::size_t i = l.vertex(0, 0), j = l.vertex(3, 2);
  Rng rng(21);
  for (double p : {0.05, 0.12, 0.3}) {
    auto spec = ChannelSpec::z_dephase(0, p);
    const std::size_t ends[2] = {i, j};
    for (int t = 0; t < 3; ++t) {
      auto m = sample_trajectory(g, spec, ends, rng);
      double a = type1_sc(g, spec, m, i, j, ScMethod::ising_map).value;
      double b = type1_sc(g, spec, m, i, j, ScMethod::stabilizer_sum).value;
      EXPECT_NEAR(a, b, 1e-9) << p;
    }
    // Arbitrary outcome strings, not only typical ones.
    std::vector<int> m(g.n_qubits());
    for (auto& v : m) v = rng.pm1();
    EXPECT_NEAR(type1_sc(g, spec, m, i, j, ScMethod::ising_map).value,
                type1_sc(g, spec, m, i, j, ScMethod::stabilizer_sum).value, 1e-9);
  }
}

TEST(TypeI, MethodMismatchesAreRejected) {
  auto chain = ScGeometry::chain_1d(3);
  std::vector<int> m(chain.n_qubits(), 1);
  EXPECT_THROW(type1_sc(chain, ChannelSpec::z_dephase(0, 0.1), m, 0, 4, ScMethod::ising_map), std::invalid_argument);
  auto cyl = ScGeometry::cylinder_2d(3, 3);
  std::vector<int> mc(cyl.n_qubits(), 1);
  EXPECT_THROW(type1_sc(cyl, ChannelSpec::y_dephase(0, 0.1), mc, 0, 6, ScMethod::ising_map), std::invalid_argument);
  EXPECT_THROW(type1_sc(cyl, ChannelSpec::z_dephase(0.1, 0.1), mc, 0, 6, ScMethod::ising_map), std::invalid_argument);
  EXPECT_THROW(type1_sc(chain, ChannelSpec::z_dephase(0, 0.1), m, 0, 4, ScMethod::closed_form), UnsupportedClosedForm);
  EXPECT_THROW(type1_sc(chain, ChannelSpec::z_dephase(0, 0.1), m, 2, 2, ScMethod::dense), std::out_of_range);
}

TEST(Perturbed, ZeroPerturbationIsTheIsingMap) {
  auto g = ScGeometry::cylinder_2d(5, 4);
  LiebCylinder2D l(5, 4);
  Rng rng(4);
  auto spec = ChannelSpec::z_dephase(0, 0.1);
  const std::size_t ends[2] = {l.vertex(0, 0), l.vertex(4, 1)};
  auto m = sample_trajectory(g, spec, ends, rng);
  EXPECT_EQ(perturbed_type1_sc(g, 0.1, 0.0, m, ends[0], ends[1]).value,
            type1_sc(g, spec, m, ends[0], ends[1], ScMethod::ising_map).value);
}

TEST(Perturbed, FerromagneticBiasOnSharedDisorder) {
  auto g = ScGeometry::cylinder_2d(6, 6);
  LiebCylinder2D l(6, 6);
  IsingLattice lat(6, 6);
  Rng rng(12);
  const std::size_t i = l.vertex(0, 0), j = l.vertex(5, 3);
  Accumulator diff;
  std::vector<int> m(g.n_qubits(), 1);
  for (int k = 0; k < 200; ++k) {
    auto d = sample_nishimori(lat, 0.05, rng);
    std::copy(d.bonds.begin(), d.bonds.end(), m.begin() + static_cast<std::ptrdiff_t>(l.n_vertices()));
    diff.add(perturbed_type1_sc(g, 0.05, 0.1, m, i, j).value - perturbed_type1_sc(g, 0.05, 0.0, m, i, j).value);
  }
  EXPECT_GT(diff.mean(), 3 * diff.stderr_of_mean());
}

TEST(Perturbed, ParamagneticRegimeVanishes) {
  auto g = ScGeometry::cylinder_2d(6, 6);
  LiebCylinder2D l(6, 6);
  IsingLattice lat(6, 6);
  Rng rng(13);
  Accumulator mc, exact;
  std::vector<int> m(g.n_qubits(), 1);
  MetropolisSchedule sched;
  sched.thermalization = 200;
  sched.n_measurements = 1000;
  for (int k = 0; k < 100; ++k) {
    auto d = sample_nishimori(lat, 0.45, rng);
    std::copy(d.bonds.begin(), d.bonds.end(), m.begin() + static_cast<std::ptrdiff_t>(l.n_vertices()));
    sched.seed = 1000 + static_cast<std::uint64_t>(k);
    mc.add(perturbed_type1_sc(g, 0.45, 0.1, m, l.vertex(0, 0), l.vertex(5, 3), CorrelationMethod::metropolis, sched).value);
    exact.add(perturbed_type1_sc(g, 0.45, 0.1, m, l.vertex(0, 0), l.vertex(5, 3)).value);
  }
  EXPECT_LT(std::abs(mc.mean()), 3 * mc.stderr_of_mean());
  EXPECT_LT(std::abs(exact.mean()), 1e-4);
  EXPECT_THROW(perturbed_type1_sc(g, 0.1, -0.1, m, 0, 1), std::invalid_argument);
}

TEST(Blocks, ReconstructionMatchesReducedDensity) {
  auto g = ScGeometry::chain_1d(3);
  const std::size_t n = g.n_qubits();
  auto spec = ChannelSpec::z_dephase(0, 0.2);
  CMat rho = decohered_density(g, spec);
  Rng rng(6);
  CMat h = channel_detail::hadamard();
  for (int t = 0; t < 4; ++t) {
    const std::size_t ends[2] = {0, n - 1};
    auto m = sample_trajectory(g, spec, ends, rng);
    auto blk = trajectory_block(g, spec, m, 0, n - 1);
    // Independent route: project the density matrix, trace out the bulk, rotate to the X basis.
    std::vector<CMat> proj;
    for (std::size_t q = 0; q < n; ++q) proj.push_back(q == 0 || q == n - 1 ? CMat::Identity(2, 2) : xproj(m[q]));
    DenseState post = DenseState::from_density(kron_all(proj) * rho * kron_all(proj) / (kron_all(proj) * rho).trace());
    CMat red = post.reduced(std::initializer_list<std::size_t>{0, n - 1});
    CMat hh = kron_low_first(h, h);
    CMat want = hh * red * hh;
    EXPECT_LT((reconstruct_block(blk) - want).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((*blk.dense - want).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT(std::max(blk.diagonal_gap[0], blk.diagonal_gap[1]), 1e-9);
    EXPECT_NEAR(std::max(blk.sector_prob[0], blk.sector_prob[1]), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(type1_sc(g, spec, m, 0, n - 1, ScMethod::dense).value),
                std::abs(blk.sector_sc[blk.sector_prob[0] > 0.5 ? 0 : 1]), 1e-12);
  }
}

TEST(IcFromSc, Limits) {
  TrajectoryBlock pure;
  pure.sector_prob = {1, 0};
  pure.sector_sc = {1, 0};
  EXPECT_NEAR(ic_from_sc(std::vector<TrajectoryBlock>{pure, pure}).value, 1.0, 1e-15);
  TrajectoryBlock classical = pure;
  classical.sector_sc = {0, 0};
  EXPECT_NEAR(ic_from_sc(std::vector<TrajectoryBlock>{classical}).value, 0.0, 1e-15);
  TrajectoryBlock bad = pure;
  bad.sector_prob = {0.7, 0.7};
  EXPECT_THROW(ic_from_sc(std::vector<TrajectoryBlock>{bad}), std::invalid_argument);
}

TEST(IcFromSc, ReproducesChainClosedForms) {
  // Receiver kept noiseless, as in the transmission protocol.
  for (auto [N, pa, pb] : {std::tuple<std::size_t, double, double>{3, 0.0, 0.1}, {4, 0.0, 0.2}, {3, 0.1, 0.1}, {3, 0.2, 0.05}}) {
    auto g = ScGeometry::chain_1d(N);
    const std::size_t n = g.n_qubits();
    auto spec = ChannelSpec::z_dephase(pa, pb);
    const std::size_t rx[1] = {n - 1};
    std::vector<TrajectoryBlock> blocks;
    const std::size_t nb = n - 2;
    for (std::size_t c = 0; c < (std::size_t{1} << nb); ++c) {
      std::vector<int> m(n, 1);
      for (std::size_t k = 0; k < nb; ++k) m[k + 1] = ((c >> k) & 1u) ? -1 : 1;
      blocks.push_back(trajectory_block(g, spec, m, 0, n - 1, ScMethod::dense, rx));
    }
    auto rep = ic_from_sc(blocks);
    EXPECT_EQ(rep.n_fallback, 0u);
    EXPECT_NEAR(rep.value, ic_1d_zdephase_closed(N, pa, pb), 1e-9) << N << " " << pa << " " << pb;
  }
}

TEST(IcFromSc, FallsBackWhenDiagonalsDiffer) {
  TrajectoryBlock b;
  b.sector_prob = {1, 0};
  b.diagonal_gap = {0.2, 0};
  CMat r = CMat::Zero(4, 4);
  r(0, 0) = 0.6;
  r(3, 3) = 0.4;
  b.dense = r;
  b.sector_sc = {0, 0};
  auto rep = ic_from_sc(std::vector<TrajectoryBlock>{b});
  EXPECT_TRUE(rep.fallback());
  // Classically correlated pair: S(j) - S(ij) = 0.
  EXPECT_NEAR(rep.value, 0.0, 1e-12);
}

TEST(GaugeAverage, BornAndIidAveragesCoincide) {
  IsingLattice lat(3, 4);
  for (double p : {0.08, 0.2}) {
    auto r = gauge_average_check(3, 4, p, lat.spin(0, 0), lat.spin(2, 2));
    EXPECT_EQ(r.n_configs, std::size_t{1} << 20);
    EXPECT_NEAR(r.born, r.iid, 1e-10) << p;
  }
}
