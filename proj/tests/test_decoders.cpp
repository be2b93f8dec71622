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

#include "mixspt/decoders.hpp"

using namespace mixspt;

namespace {

std::vector<int> all_plus(const SyndromeLattice& g) { return std::vector<int>(g.n_edges(), 1); }

// Brute-force minimum total weight over all pairings of the defects.
double brute_pairing(const std::vector<std::vector<double>>& d, std::vector<char>& used) {
  int i = -1;
  for (std::size_t k = 0; k < used.size(); ++k)
    if (!used[k]) {
      i = static_cast<int>(k);
      break;
    }
  if (i < 0) return 0;
  used[i] = 1;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < used.size(); ++j)
    if (!used[j]) {
      used[j] = 1;
      best = std::min(best, d[i][j] + brute_pairing(d, used));
      used[j] = 0;
    }
  used[i] = 0;
  return best;
}

// Shortest flip-path length between two nodes (unit weights) by BFS.
int bfs_distance(const SyndromeLattice& g, int a, int b) {
  std::vector<int> dist(g.n_nodes(), -1);
  std::vector<int> q{a};
  dist[a] = 0;
  for (std::size_t h = 0; h < q.size(); ++h) {
    int u = q[h];
    for (std::size_t s = 0; s < g.n_edges(); ++s) {
      if (!g.noisy(s)) continue;
      auto e = g.ends(s);
      if (e[0] != u && e[1] != u) continue;
      int v = e[0] == u ? e[1] : e[0];
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        q.push_back(v);
      }
    }
  }
  return dist[b];
}

}  // namespace

TEST(Decoder1D, CleanAndScrambledLimits) {
  std::vector<int> m{1, -1, -1, 1, 1, 1};
  auto clean = decode_1d_ml(m, 3, 0.0, 0.0);
  EXPECT_EQ(clean.entropy, 0.0);
  EXPECT_EQ(clean.gamma_hat[0], -1);
  EXPECT_EQ(clean.gamma_hat[1], -1);
  EXPECT_NEAR(decode_1d_ml(m, 3, 0.5, 0.0).entropy, 1.0, 1e-15);
  EXPECT_NEAR(decode_1d_ml(m, 3, 0.5, 0.5).entropy, 2.0, 1e-15);
  EXPECT_THROW(decode_1d_ml(m, 2, 0.1, 0.1), std::invalid_argument);
}

TEST(Decoder1D, SuccessProbabilityMatchesSampledEnvironments) {
  const std::size_t N = 10;
  const double p = 0.1;
  const double t = std::pow(1 - 2 * p, 10.0);
  auto d = decode_1d_ml(std::vector<int>(2 * N, 1), N, p, 0.0);
  EXPECT_NEAR(d.entropy, h2((1 + t) / 2), 1e-15);
  Rng rng(99);
  std::size_t ok = 0;
  const std::size_t n = 100000;
  for (std::size_t k = 0; k < n; ++k) {
    auto s = sample_disorder_1d(N, ChannelSpec::z_dephase(p, 0.0), rng);
    auto g = decode_1d_ml(s.m, N, p, 0.0);
    int truth = 1;
    for (std::size_t i = 0; i < 2 * N; i += 2) truth *= s.x[i];
    ok += g.gamma_hat[0] == truth;
  }
  double want = (1 + t) / 2;
  double se = std::sqrt(want * (1 - want) / n);
  EXPECT_LT(std::abs(static_cast<double>(ok) / n - want), 3 * se);
}

TEST(Decoder1D, ZDephasingEstimatorIsExact) {
  for (std::size_t N : {1, 3, 5}) {
    auto r = coherent_info_decoder_1d(N, ChannelSpec::z_dephase(0.15, 0.05), 200, 1);
    EXPECT_NEAR(r.value, ic_1d_zdephase_closed(N, 0.15, 0.05), 1e-12);
  }
}

TEST(Decoder1D, AgreesWithDenseForSdc) {
  for (auto spec : {ChannelSpec::sdc(0.3, 0.2, 0.6, SublatticeMask::a), ChannelSpec::sdc(0.9, 0.5, 0.4, SublatticeMask::both)})
    for (std::size_t N : {1, 2}) {
      double dense = coherent_info_no_env_dense(layout_1d(N), spec).value;
      auto mc = coherent_info_decoder_1d(N, spec, 20000, 11);
      EXPECT_LT(std::abs(mc.value - dense), 3 * mc.stderr_) << nlohmann::json(spec).dump() << " N=" << N;
    }
}

TEST(SyndromeGraph, GeometryAndParity) {
  SyndromeLattice g(4, 5);
  EXPECT_EQ(g.n_plaquettes(), 15);
  std::size_t noisy = 0;
  for (std::size_t s = 0; s < g.n_edges(); ++s) noisy += g.noisy(s);
  EXPECT_EQ(noisy, 15u + 10u);
  EXPECT_TRUE(g.defects(all_plus(g)).empty());
  Rng rng(4);
  for (int k = 0; k < 50; ++k) {
    auto d = sample_disorder_2d(g, ChannelSpec::z_dephase(0, 0.2), rng);
    EXPECT_EQ(g.defects(d.m).size() % 2, 0u);
    EXPECT_TRUE(g.defects(d.x).empty());
  }
  for (const auto& b : g.cycle_basis()) {
    std::vector<int> m = all_plus(g);
    for (std::size_t s = 0; s < g.n_edges(); ++s)
      if (b[s]) m[s] = -1;
    EXPECT_TRUE(g.defects(m).empty());
  }
  EXPECT_EQ(g.cycle_basis().size(), 2u * 5u + 1u);
  EXPECT_EQ(SyndromeLattice(4, 5, true).cycle_basis().size(), 4u * 5u - 1u);
}

TEST(Matching2D, ZeroAndAdjacentDefects) {
  SyndromeLattice g(5, 5);
  auto model = error_model(g, ChannelSpec::z_dephase(0, 0.1), all_plus(g));
  auto m = all_plus(g);
  m[g.slot(g.lattice().hedge(0, 0))] = -1;
  auto none = decode_2d_matching(g, all_plus(g), model);
  EXPECT_EQ(none.n_defects, 0u);
  EXPECT_EQ(none.gamma_line_hat, 1);
  EXPECT_EQ(std::count(none.correction.begin(), none.correction.end(), 1), 0);
  std::vector<int> mm = all_plus(g);
  std::size_t e = g.slot(g.lattice().hedge(2, 3));
  mm[e] = -1;
  auto one = decode_2d_matching(g, mm, model);
  EXPECT_EQ(one.n_defects, 2u);
  EXPECT_EQ(std::count(one.correction.begin(), one.correction.end(), 1), 1);
  EXPECT_EQ(one.correction[e], 1);
  auto line = decode_2d_matching(g, m, model);
  EXPECT_EQ(line.gamma_line_hat, 1);
  EXPECT_EQ(g.line_product(m), -1);
}

TEST(Matching2D, OptimalOnSmallInstances) {
  SyndromeLattice g(6, 6);
  Rng rng(12);
  auto spec = ChannelSpec::z_dephase(0, 0.08);
  int checked = 0;
  for (int k = 0; k < 400 && checked < 60; ++k) {
    auto d = sample_disorder_2d(g, spec, rng);
    auto defects = g.defects(d.m);
    if (defects.empty() || defects.size() > 8) continue;
    auto model = error_model(g, spec, d.m);
    auto dec = decode_2d_matching(g, d.m, model);
    std::vector<std::vector<double>> dist(defects.size(), std::vector<double>(defects.size()));
    for (std::size_t i = 0; i < defects.size(); ++i)
      for (std::size_t j = 0; j < defects.size(); ++j) dist[i][j] = bfs_distance(g, defects[i], defects[j]);
    std::vector<char> used(defects.size(), 0);
    double per_edge = std::log((1 - 0.08) / 0.08);
    EXPECT_NEAR(dec.weight, brute_pairing(dist, used) * per_edge, 1e-3);
    auto corrected = d.m;
    for (std::size_t s = 0; s < g.n_edges(); ++s)
      if (dec.correction[s]) corrected[s] = -corrected[s];
    EXPECT_TRUE(g.defects(corrected).empty());
    ++checked;
  }
  EXPECT_GE(checked, 30);
}

TEST(Matching2D, HomologySoundness) {
  SyndromeLattice g(6, 6);
  auto spec = ChannelSpec::z_dephase(0, 0.1);
  auto basis = g.cycle_basis();
  Rng rng(5);
  for (int k = 0; k < 100; ++k) {
    auto d = sample_disorder_2d(g, spec, rng);
    auto model = error_model(g, spec, d.m);
    int base = decode_2d_matching(g, d.m, model).gamma_line_hat;
    // every basis element except the final (non-contractible) loop is a star
    const auto& star = basis[rng.below(basis.size() - 1)];
    auto m2 = d.m;
    for (std::size_t s = 0; s < g.n_edges(); ++s)
      if (star[s]) m2[s] = -m2[s];
    EXPECT_EQ(decode_2d_matching(g, m2, model).gamma_line_hat, base);
  }
}

TEST(ClassProbability, SumsToOneOverAllOutcomes) {
  SyndromeLattice g(3, 3);
  const std::size_t ne = g.n_edges();
  for (auto spec : {ChannelSpec::z_dephase(0, 0.17), ChannelSpec::sdc(0.4, 0.3, 0.7, SublatticeMask::b)}) {
    double total = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << ne); ++mask) {
      std::vector<int> m(ne);
      for (std::size_t s = 0; s < ne; ++s) m[s] = (mask >> s) & 1u ? -1 : 1;
      // boundary columns are noiseless: only outcomes with trivial boundary parity occur
      auto def = g.defects(m);
      if (std::find(def.begin(), def.end(), g.left_node()) != def.end() ||
          std::find(def.begin(), def.end(), g.right_node()) != def.end())
        continue;
      auto cl = class_probability_exact(g, m, error_model(g, spec, m));
      total += cl.p[0] + cl.p[1];
    }
    EXPECT_NEAR(total, 1.0, 1e-12) << nlohmann::json(spec).dump();
  }
}

TEST(ClassProbability, CleanLatticeSaturatesDelta) {
  SyndromeLattice g(4, 4);
  auto m = all_plus(g);
  auto cl = class_probability_exact(g, m, error_model(g, ChannelSpec::z_dephase(0, 0.0), m));
  EXPECT_TRUE(cl.delta_saturated);
  EXPECT_EQ(cl.delta, kDeltaSaturated);
  EXPECT_EQ(cl.p[1], 0.0);
  EXPECT_EQ(cl.posterior_entropy, 0.0);
}

TEST(ClassProbability, SdcWithoutEnvironmentBiasIsHalfStrengthDephasing) {
  SyndromeLattice g(4, 4);
  Rng rng(8);
  auto sdc = ChannelSpec::sdc(0.7, 0.0, 0.3, SublatticeMask::b);
  auto z = ChannelSpec::z_dephase(0, 0.15);
  for (int k = 0; k < 20; ++k) {
    auto d = sample_disorder_2d(g, sdc, rng);
    auto a = class_probability_exact(g, d.m, error_model(g, sdc, d.m));
    auto b = class_probability_exact(g, d.m, error_model(g, z, d.m));
    for (int c = 0; c < 2; ++c) EXPECT_NEAR(a.p[c], b.p[c], 1e-12 * std::max(1e-300, b.p[c]) + 1e-300);
  }
}

TEST(ClassProbability, DeltaGrowsWithSizeBelowThreshold) {
  auto spec = ChannelSpec::z_dephase(0, 0.04);
  auto small = run_decoder_2d(SyndromeLattice(3, 3), spec, 3000, 1, true);
  auto large = run_decoder_2d(SyndromeLattice(4, 4), spec, 3000, 2, true);
  EXPECT_GT(large.delta.mean(), small.delta.mean());
}

TEST(ClassProbability, MatchingAgreesWithMaximumLikelihoodAtLowNoise) {
  SyndromeLattice g(4, 4);
  auto spec = ChannelSpec::z_dephase(0, 0.05);
  auto ml = run_decoder_2d(g, spec, 4000, 21, true);
  auto mw = run_decoder_2d(g, spec, 4000, 21, false);
  double se = std::hypot(ml.failures.stderr_(), mw.failures.stderr_());
  EXPECT_LE(ml.failures.value(), mw.failures.value() + 1e-12);
  EXPECT_LT(std::abs(ml.failures.value() - mw.failures.value()), 3 * se + 1e-12);
  auto lo = run_decoder_2d(SyndromeLattice(12, 12), spec, 1000, 3, false);
  auto hi = run_decoder_2d(SyndromeLattice(12, 12), ChannelSpec::z_dephase(0, 0.15), 1000, 3, false);
  EXPECT_LT(lo.failures.value(), hi.failures.value());
}

TEST(ClassProbability, SizeCapIsEnforced) {
  SyndromeLattice g(8, 8);
  auto m = all_plus(g);
  EXPECT_THROW(class_probability_exact(g, m, error_model(g, ChannelSpec::z_dephase(0, 0.1), m)), SizeCapExceeded);
}

TEST(Decoder2D, SuccessIsMonotoneInNoise) {
  SyndromeLattice g(8, 8);
  double prev = -1;
  double prev_se = 0;
  for (double p : {0.02, 0.06, 0.1, 0.14}) {
    auto st = run_decoder_2d(g, ChannelSpec::z_dephase(0, p), 2000, 7, false);
    double f = st.failures.value();
    EXPECT_GE(f + 3 * std::hypot(st.failures.stderr_(), prev_se), prev);
    prev = f;
    prev_se = st.failures.stderr_();
  }
}

TEST(Decoder2D, VertexChargeIsExactWithoutVertexNoise) {
  EXPECT_EQ(gamma_v_entropy(12, 0.0), 0.0);
  EXPECT_NEAR(gamma_v_entropy(12, 0.5), 1.0, 1e-15);
}

TEST(Decoder2D, NoisyBoundaryLosesInformation) {
  auto spec = ChannelSpec::z_dephase(0, 0.05);
  auto closed = coherent_info_decoder_2d(3, 4, spec, 400, 3, false);
  auto open = coherent_info_decoder_2d(3, 4, spec, 400, 3, true);
  EXPECT_FALSE(closed.lower_bound);
  EXPECT_LT(open.value, closed.value);
  auto big = coherent_info_decoder_2d(10, 10, spec, 300, 3, false);
  EXPECT_TRUE(big.lower_bound);
  EXPECT_GT(big.value, 0.5);
}

TEST(Threshold, CrossingOfSyntheticCurves) {
  std::vector<ThresholdPoint> pts;
  for (std::size_t L : {8, 12, 16})
    for (double p : {0.08, 0.09, 0.1, 0.11, 0.12}) {
      double f = 0.5 / (1 + std::exp(-(p - 0.1) * static_cast<double>(L) * 4)) ;
      pts.push_back({L, p, 100000, static_cast<std::size_t>(std::llround(f * 100000))});
    }
  auto est = estimate_threshold(pts, 200, 3);
  EXPECT_NEAR(est.p_c, 0.1, 2e-3);
  EXPECT_LE(est.ci_low, est.p_c);
  EXPECT_GE(est.ci_high, est.p_c);
}

TEST(Threshold, GridAboveTheCrossingIsRejected) {
  std::vector<ThresholdPoint> pts;
  for (std::size_t L : {8, 12})
    for (double p : {0.22, 0.25, 0.3}) {
      double f = 0.5 / (1 + std::exp(-(p - 0.1) * static_cast<double>(L) * 4));
      pts.push_back({L, p, 1000, static_cast<std::size_t>(std::llround(f * 1000))});
    }
  EXPECT_THROW(estimate_threshold(pts, 10, 1), NoCrossing);
}
