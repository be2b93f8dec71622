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

#include "mixspt/virtual.hpp"

using namespace mixspt;

TEST(Virtual1D, PureEvolutionIsUnitaryGivenOutcomes) {
  Rng rng(2);
  for (int k = 0; k < 50; ++k) {
    auto ev = sample_virtual_1d(5, 0, 0, rng);
    auto v = run_virtual_1d(ev);
    EXPECT_NEAR(std::abs(v(0) + v(3)) / std::sqrt(2.0), 1.0, 1e-12);
    EXPECT_EQ(bell_class(v), 0);
  }
  auto r = simulate_virtual_1d(6, 0.0, 500);
  EXPECT_NEAR(r.value, 1.0, 1e-12);
  EXPECT_EQ(r.stderr_, 0.0);
}

TEST(Virtual1D, ErrorsOnOneSublatticeShareOnePauliType) {
  VirtualEvolution ev;
  for (int k = 0; k < 6; ++k) ev.steps.push_back({k % 2, k == 2, false});
  ev.steps[1].error = true;
  EXPECT_EQ(bell_class(run_virtual_1d(ev)), 1);
  ev.steps[3].error = true;
  EXPECT_EQ(bell_class(run_virtual_1d(ev)), 0);
  ev.steps[0].error = true;
  EXPECT_EQ(bell_class(run_virtual_1d(ev)), 2);
  ev.steps[3].error = false;
  EXPECT_EQ(bell_class(run_virtual_1d(ev)), 3);
}

TEST(Virtual1D, MatchesClosedFormAtTenSteps) {
  auto r = simulate_virtual_1d(10, 0.1, 100000, 5);
  double want = 1 - h2((1 + std::pow(0.8, 10)) / 2);
  EXPECT_NEAR(want, ic_1d_zdephase_closed(10, 0, 0.1), 1e-12);
  EXPECT_GT(r.stderr_, 0.0);
  EXPECT_LT(std::abs(r.value - want), std::max(3 * r.stderr_, 1e-12)) << r.value << " +- " << r.stderr_;
}

TEST(Virtual1D, FullyScrambledAtHalf) {
  auto r = simulate_virtual_1d(4, 0.5, 20000, 9);
  EXPECT_LE(std::abs(r.value), r.stderr_) << r.value;
}

TEST(Virtual1D, RejectsBadStrengths) {
  EXPECT_THROW(simulate_virtual_1d(3, 0.6, 10), std::invalid_argument);
  EXPECT_THROW(simulate_virtual_1d(3, -0.1, 0.2, 10, 1), std::invalid_argument);
  EXPECT_THROW(simulate_virtual_1d(0, 0.1, 10), std::invalid_argument);
}

TEST(Virtual1D, EstimatorTriangle) {
  for (std::size_t N : {2u, 3u, 4u})
    for (auto [pa, pb] : {std::pair{0.0, 0.1}, {0.0, 0.3}, {0.1, 0.2}, {0.05, 0.05}}) {
      auto spec = ChannelSpec::z_dephase(pa, pb);
      double closed = ic_1d_zdephase_closed(N, pa, pb);
      double dense = coherent_info_no_env_dense(layout_1d(N), spec).value;
      auto mc = simulate_virtual_1d(N, pa, pb, 20000, 100 + N);
      EXPECT_NEAR(dense, closed, 1e-9) << N << " " << pa << " " << pb;
      EXPECT_LT(std::abs(mc.value - closed), 3 * mc.stderr_) << N << " " << pa << " " << pb << " " << mc.value;
      EXPECT_LT(std::abs(mc.value - dense), 3 * mc.stderr_) << N << " " << pa << " " << pb;
    }
}

namespace {

void expect_same_history(const SyndromeLattice& g, const Disorder2D& d) {
  auto h = run_virtual_2d(foliate(g, d));
  EXPECT_EQ(recorded_outcomes(g, h), d.m);
  EXPECT_EQ(h.detections, g.defects(d.m));
  EXPECT_EQ(h.frame_change, g.line_product(d.x));
}

}  // namespace

TEST(Virtual2D, SyndromeHistoriesMatchDecoderDisorder) {
  for (bool nb : {false, true}) {
    SyndromeLattice g(5, 4, nb);
    auto spec = ChannelSpec::z_dephase(0, 0.15);
    for (std::size_t t = 0; t < 300; ++t) {
      Rng rng = Rng(17).split(t);
      expect_same_history(g, sample_disorder_2d(g, spec, rng));
    }
  }
}

TEST(Virtual2D, SyndromeHistoriesMatchDirectClusterSimulation) {
  SyndromeLattice g(4, 3);
  std::size_t lit = 0;
  for (std::size_t t = 0; t < 60; ++t) {
    Rng rng = Rng(23).split(t);
    auto d = sample_cluster_disorder_2d(g, 0.2, rng);
    expect_same_history(g, d);
    lit += g.defects(d.m).size();
  }
  EXPECT_GT(lit, 0u);
}

TEST(Virtual2D, NonGaugeOutcomesAreRejected) {
  SyndromeLattice g(4, 3);
  Rng rng(1);
  auto d = sample_disorder_2d(g, ChannelSpec::z_dephase(0, 0.0), rng);
  d.x[g.slot(g.lattice().vedge(2, 1))] *= -1;
  EXPECT_THROW(foliate(g, d), InvariantViolation);
}

TEST(Virtual2D, SharedSeedsReproduceDecoderFailures) {
  SyndromeLattice g(6, 6);
  auto spec = ChannelSpec::z_dephase(0, 0.08);
  auto direct = run_decoder_2d(g, spec, 1500, 41, false);
  Virtual2DOptions opt;
  opt.source = VirtualNoiseSource::decoder_disorder;
  auto virt = simulate_virtual_2d(6, 6, 0.08, 1500, 41, opt);
  EXPECT_EQ(virt.failures.hits, direct.failures.hits);
  EXPECT_GT(virt.failures.hits, 0u);
}

TEST(Virtual2D, NativeNoiseReproducesDecoderRates) {
  for (double p : {0.06, 0.12}) {
    SyndromeLattice g(6, 6);
    auto direct = run_decoder_2d(g, ChannelSpec::z_dephase(0, p), 3000, 5, false);
    auto virt = simulate_virtual_2d(6, 6, p, 3000, 6);
    double se = std::hypot(direct.failures.stderr_(), virt.failures.stderr_());
    EXPECT_LT(std::abs(direct.failures.value() - virt.failures.value()), 3 * se) << p;
  }
}

TEST(Virtual2D, NoNoiseNeverFails) {
  for (auto src : {VirtualNoiseSource::native, VirtualNoiseSource::decoder_disorder}) {
    Virtual2DOptions opt;
    opt.source = src;
    auto r = simulate_virtual_2d(5, 5, 0.0, 300, 3, opt);
    EXPECT_EQ(r.failures.hits, 0u);
    EXPECT_EQ(r.survival(), 1.0);
  }
}

TEST(Virtual2D, FailureDecreasesWithSizeBelowCrossing) {
  auto small = simulate_virtual_2d(4, 4, 0.04, 4000, 8);
  auto large = simulate_virtual_2d(8, 8, 0.04, 4000, 9);
  double se = std::hypot(small.failures.stderr_(), large.failures.stderr_());
  EXPECT_LT(large.failures.value() + 3 * se, small.failures.value())
      << small.failures.value() << " " << large.failures.value();
}

TEST(Virtual2D, UnequalStrengthsOnlyForNativeNoise) {
  Virtual2DOptions opt;
  opt.p_meas = 0.0;
  auto clean_checks = simulate_virtual_2d(6, 6, 0.1, 2000, 4, opt);
  auto equal = simulate_virtual_2d(6, 6, 0.1, 2000, 4);
  EXPECT_LT(clean_checks.failures.value(), equal.failures.value());
  opt.source = VirtualNoiseSource::cluster_state;
  EXPECT_THROW(simulate_virtual_2d(4, 3, 0.1, 10, 1, opt), std::invalid_argument);
  EXPECT_THROW(simulate_virtual_2d(4, 3, 0.7, 10, 1), std::invalid_argument);
}
