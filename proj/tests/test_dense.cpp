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

#include <cmath>

#include "mixspt/dense.hpp"
#include "mixspt/rng.hpp"

using namespace mixspt;

namespace {

KrausChannel z_dephase(double p) {
  return {{std::sqrt(1 - p) * CMat::Identity(2, 2), std::sqrt(p) * pauli_matrix('Z')}};
}
KrausChannel amplitude_damping(double g) {
  CMat k0 = CMat::Zero(2, 2), k1 = CMat::Zero(2, 2);
  k0(0, 0) = 1;
  k0(1, 1) = std::sqrt(1 - g);
  k1(0, 1) = std::sqrt(g);
  return {{k0, k1}};
}

double h2(double x) {
  if (x <= 0 || x >= 1) return 0;
  return -x * std::log2(x) - (1 - x) * std::log2(1 - x);
}

CVec random_vector(std::size_t n, Rng& rng) {
  CVec v(std::size_t{1} << n);
  for (auto& a : v) a = cplx(rng.uniform() - 0.5, rng.uniform() - 0.5);
  return v / v.norm();
}

const CMat kX = pauli_matrix('X');

}  // namespace

TEST(Dense, DephasingZeroIsIdentity) {
  Rng rng(1);
  auto s = DenseState::from_vector(random_vector(3, rng));
  auto out = s.apply_channel(z_dephase(0.0), {1});
  EXPECT_LT((out.density() - s.density()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Dense, HalfDephasingMixesPlus) {
  auto s = DenseState::zeros(1);
  CMat h = (CMat(2, 2) << M_SQRT1_2, M_SQRT1_2, M_SQRT1_2, -M_SQRT1_2).finished();
  s.apply_unitary(h, {0});
  auto out = s.apply_channel(z_dephase(0.5), {0});
  EXPECT_EQ(out.kind(), StateKind::mixed);
  EXPECT_NEAR(out.entropy({0}), 1.0, 1e-12);
}

TEST(Dense, NonCptpRejected) {
  auto s = DenseState::zeros(1);
  KrausChannel bad{{CMat::Identity(2, 2), pauli_matrix('Z')}};
  EXPECT_THROW(s.apply_channel(bad, {0}), std::domain_error);
  EXPECT_THROW(s.apply_channel(z_dephase(0.1), {3}), std::out_of_range);
}

TEST(Dense, MeasurePlusAndZero) {
  auto plus = DenseState::zeros(1);
  plus.apply_unitary(CMat((CMat(2, 2) << M_SQRT1_2, M_SQRT1_2, M_SQRT1_2, -M_SQRT1_2).finished()), {0});
  auto b = plus.projective_measure(kX, {0});
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b[0].outcome, 1);
  EXPECT_NEAR(b[0].prob, 1.0, 1e-12);
  EXPECT_THROW(plus.project(kX, std::vector<std::size_t>{0}, -1), ZeroProbabilityBranch);

  auto zero = DenseState::zeros(1);
  auto c = zero.projective_measure(kX, {0});
  ASSERT_EQ(c.size(), 2u);
  EXPECT_NEAR(c[0].prob, 0.5, 1e-12);
  EXPECT_NEAR(c[1].prob, 0.5, 1e-12);
}

TEST(Dense, ClusterBulkMeasurementGivesBellPairs) {
  // 5-site chain via CZ on |+>^5; measure sites 1..3 in X.
  auto s = DenseState::zeros(5);
  CMat h = (CMat(2, 2) << M_SQRT1_2, M_SQRT1_2, M_SQRT1_2, -M_SQRT1_2).finished();
  CMat cz = CMat::Identity(4, 4);
  cz(3, 3) = -1;
  for (std::size_t q = 0; q < 5; ++q) s.apply_unitary(h, {q});
  for (std::size_t q = 0; q + 1 < 5; ++q) s.apply_unitary(cz, {q, q + 1});
  int count = 0;
  for (int m1 : {1, -1})
    for (int m2 : {1, -1})
      for (int m3 : {1, -1}) {
        auto b1 = s.project(kX, std::vector<std::size_t>{1}, m1);
        auto b2 = b1.post.project(kX, std::vector<std::size_t>{2}, m2);
        auto b3 = b2.post.project(kX, std::vector<std::size_t>{3}, m3);
        EXPECT_NEAR(b1.prob * b2.prob * b3.prob, 0.125, 1e-12);
        EXPECT_NEAR(b3.post.entropy({0}), 1.0, 1e-10);
        EXPECT_NEAR(mutual_information(b3.post, {0}, {4}), 2.0, 1e-10);
        ++count;
      }
  EXPECT_EQ(count, 8);
}

TEST(Dense, MutualInformationBasics) {
  CVec bell = CVec::Zero(4);
  bell(0) = bell(3) = M_SQRT1_2;
  auto s = DenseState::from_vector(bell);
  EXPECT_NEAR(mutual_information(s, {0}, {1}), 2.0, 1e-12);
  auto prod = DenseState::zeros(2);
  EXPECT_NEAR(mutual_information(prod, {0}, {1}), 0.0, 1e-12);
  EXPECT_THROW(mutual_information(s, {0}, {0}), std::invalid_argument);
}

TEST(Dense, ChargeBlockMutualInformation) {
  // X-basis block state: each parity sector is p/2 [[1, sc], [sc, 1]].
  const double sc = 0.6;
  const double p[2] = {0.5, 0.5};
  CMat rho_x = CMat::Zero(4, 4);
  // X-basis index: bit0 = L, bit1 = R; sector parity = xL xor xR.
  rho_x(0, 0) = rho_x(3, 3) = p[0] / 2;
  rho_x(0, 3) = rho_x(3, 0) = p[0] * sc / 2;
  rho_x(1, 1) = rho_x(2, 2) = p[1] / 2;
  rho_x(1, 2) = rho_x(2, 1) = p[1] * sc / 2;
  CMat h = (CMat(2, 2) << M_SQRT1_2, M_SQRT1_2, M_SQRT1_2, -M_SQRT1_2).finished();
  CMat hh = kron_low_first(h, h);
  auto s = DenseState::from_density(hh * rho_x * hh.adjoint());
  double expected = 2 - (p[0] + p[1]) * h2((1 + sc) / 2) - 1.0;
  EXPECT_NEAR(mutual_information(s, {0}, {1}), expected, 1e-12);
}

TEST(Dense, PureEntropyZeroAndCaps) {
  Rng rng(8);
  auto s = DenseState::from_vector(random_vector(6, rng));
  EXPECT_NEAR(von_neumann_bits(s.density()), 0.0, 1e-9);
  EXPECT_THROW(DenseState::zeros(23), SizeCapExceeded);
  EXPECT_THROW(DenseState::zeros(15).to_mixed(), SizeCapExceeded);
}

TEST(Dense, ChannelsPreserveTraceHermiticityAndDataProcessing) {
  Rng rng(31);
  std::vector<KrausChannel> chans = {z_dephase(0.2), z_dephase(0.5), amplitude_damping(0.3)};
  for (int t = 0; t < 10; ++t) {
    auto s = DenseState::from_vector(random_vector(4, rng));
    for (const auto& ch : chans) {
      auto out = s.apply_channel(ch, {2});
      CMat r = out.density();
      EXPECT_NEAR(r.trace().real(), 1.0, 1e-10);
      EXPECT_LT((r - r.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
      std::vector<std::size_t> a{0, 1}, b{2, 3};
      EXPECT_LE(mutual_information(out, a, b), mutual_information(s, a, b) + 1e-9);
      auto out2 = out.apply_channel(ch, {3});
      EXPECT_LE(mutual_information(out2, a, b), mutual_information(out, a, b) + 1e-9);
    }
  }
}

TEST(Dense, CollapseMatchesProjection) {
  Rng rng(12);
  auto s = DenseState::from_vector(random_vector(4, rng));
  for (int o : {1, -1}) {
    auto [prob, rest] = s.collapse_qubit(1, 'X', o);
    auto br = s.project(kX, std::vector<std::size_t>{1}, o);
    EXPECT_NEAR(prob, br.prob, 1e-12);
    CMat a = rest.density();
    CMat b = br.post.reduced({0, 2, 3});
    EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);
  }
}
