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

// Invariant suites shared by the command-line selftest and the acceptance run.

#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mixspt/channels.hpp"
#include "mixspt/decoders.hpp"
#include "mixspt/dense.hpp"
#include "mixspt/protocol.hpp"
#include "mixspt/statmech.hpp"
#include "mixspt/virtual.hpp"

namespace mixspt {

struct SuiteResult {
  std::string name;
  bool passed = true;
  std::size_t checks = 0, failures = 0;
  std::string first_failure;
  double seconds = 0;
};

inline void to_json(nlohmann::json& j, const SuiteResult& r) {
  j = {{"suite", r.name}, {"passed", r.passed}, {"checks", r.checks}, {"failures", r.failures},
       {"first_failure", r.first_failure}};
}

class SuiteRecorder {
 public:
  explicit SuiteRecorder(std::string name) { res_.name = std::move(name); }
  void check(bool ok, const std::string& what) {
    ++res_.checks;
    if (ok) return;
    ++res_.failures;
    res_.passed = false;
    if (res_.first_failure.empty()) res_.first_failure = what;
  }
  void near(double got, double want, double tol, const std::string& what) {
    std::ostringstream os;
    os << what << ": got " << got << ", want " << want << " +- " << tol;
    check(std::abs(got - want) <= tol, os.str());
  }
  SuiteResult result() const { return res_; }

 private:
  SuiteResult res_;
};

namespace selftest_detail {

inline std::vector<ChannelSpec> channel_zoo() {
  using M = SublatticeMask;
  return {ChannelSpec::z_dephase(0.2, 0.35),          ChannelSpec::y_dephase(0.1, 0.5),
          ChannelSpec::swap(M::both),                 ChannelSpec::controlled_hadamard(0.7, M::both),
          ChannelSpec::controlled_hadamard(M_PI / 2, M::a), ChannelSpec::sdc(0.3, 0.2, 1.0, M::both),
          ChannelSpec::sdc(M_PI / 2, 0.4, 0.6, M::b), ChannelSpec::sdc(0.5, M_PI / 4, 0.3, M::both)};
}

inline CVec random_vector(std::size_t nbits, Rng& rng) {
  CVec v(std::size_t{1} << nbits);
  for (auto& a : v) a = cplx(rng.uniform() - 0.5, rng.uniform() - 0.5);
  return v / v.norm();
}

inline std::string spec_text(const ChannelSpec& s) { return nlohmann::json(s).dump(); }

}  // namespace selftest_detail

// Completeness of every Kraus set, and channels applied to random states stay states.
inline SuiteResult suite_cptp() {
  SuiteRecorder r("cptp");
  Rng rng(101);
  for (const auto& spec : selftest_detail::channel_zoo())
    for (int sub : {0, 1}) {
      auto ch = kraus_of(spec, sub);
      r.check(ch.cptp_residual() <= 1e-10, "Kraus completeness " + selftest_detail::spec_text(spec));
      auto s = DenseState::from_vector(selftest_detail::random_vector(3, rng)).apply_channel(ch, {1});
      CMat rho = s.density();
      Eigen::SelfAdjointEigenSolver<CMat> es(rho);
      r.near(rho.trace().real(), 1.0, 1e-10, "trace " + selftest_detail::spec_text(spec));
      r.check((rho - rho.adjoint()).cwiseAbs().maxCoeff() <= 1e-12, "hermiticity " + selftest_detail::spec_text(spec));
      r.check(es.eigenvalues().minCoeff() >= -1e-12, "positivity " + selftest_detail::spec_text(spec));
    }
  return r.result();
}

// I(A:B) never grows when a channel acts on B; I_c(L:RM) <= I_c(L:ERM) for the protocol.
inline SuiteResult suite_data_processing() {
  SuiteRecorder r("data_processing");
  Rng rng(202);
  const std::vector<std::size_t> a{0, 1}, b{2, 3};
  for (int t = 0; t < 6; ++t) {
    auto s = DenseState::from_vector(selftest_detail::random_vector(4, rng));
    for (const auto& spec : selftest_detail::channel_zoo()) {
      auto out = s.apply_channel(kraus_of(spec, 1), {2});
      r.check(mutual_information(out, a, b) <= mutual_information(s, a, b) + 1e-9,
              "mutual information grew under " + selftest_detail::spec_text(spec));
    }
  }
  for (const auto& spec : selftest_detail::channel_zoo()) {
    auto L = layout_1d(2);
    double erm = coherent_info_with_env(L, spec).value;
    double rm = coherent_info_no_env_dense(L, spec).value;
    r.check(rm <= erm + 1e-9, "I_c(L:RM) > I_c(L:ERM) for " + selftest_detail::spec_text(spec));
  }
  return r.result();
}

// sigma -> tau sigma, m_ij -> tau_i tau_j m_ij keeps Z and |<sigma sigma>|.
inline SuiteResult suite_gauge_invariance() {
  SuiteRecorder r("gauge_invariance");
  IsingLattice lat(4, 4);
  Rng rng(303);
  for (double p : {0.05, 0.2, 0.4}) {
    auto in = RBIMInstance::nishimori(lat, sample_nishimori(lat, p, rng).bonds, p, 0.0);
    std::vector<int> tau(lat.n_spins());
    for (auto& t : tau) t = rng.pm1();
    auto g = gauge_transform(in, tau);
    for (auto [i, j] : {std::pair<std::size_t, std::size_t>{0, 15}, {2, 9}, {5, 6}}) {
      auto x = exact_sums(in, i, j), y = exact_sums(g, i, j);
      r.near(y.log_z, x.log_z, 1e-10, "log Z");
      r.near(std::abs(y.correlation), std::abs(x.correlation), 1e-12, "|<ss>|");
      r.near(y.correlation, tau[i] * tau[j] * x.correlation, 1e-12, "signed <ss>");
    }
  }
  return r.result();
}

// Contractible loops of flips never change the matching decision; the non-contractible loop
// always does.
inline SuiteResult suite_homology_soundness() {
  SuiteRecorder r("homology_soundness");
  SyndromeLattice g(6, 6);
  auto spec = ChannelSpec::z_dephase(0, 0.1);
  auto basis = g.cycle_basis();
  Rng rng(404);
  for (int k = 0; k < 150; ++k) {
    auto d = sample_disorder_2d(g, spec, rng);
    auto model = error_model(g, spec, d.m);
    int base = decode_2d_matching(g, d.m, model).gamma_line_hat;
    auto flip = [&](const std::vector<char>& loop) {
      auto m2 = d.m;
      for (std::size_t s = 0; s < g.n_edges(); ++s)
        if (loop[s]) m2[s] = -m2[s];
      return decode_2d_matching(g, m2, model).gamma_line_hat;
    };
    r.check(flip(basis[rng.below(basis.size() - 1)]) == base, "star changed the decoded class");
    r.check(flip(basis.back()) == -base, "non-contractible loop left the decoded class unchanged");
  }
  return r.result();
}

// Weak symmetry of the symmetry-decoupling channel at its special points, and its absence
// at a generic point.
inline SuiteResult suite_weak_symmetry() {
  SuiteRecorder r("weak_symmetry_sdc");
  using M = SublatticeMask;
  for (double phi : {0.0, 0.2, 0.9})
    r.check(is_weakly_symmetric(ChannelSpec::sdc(M_PI / 2, phi, 1.0, M::both)), "theta = pi/2");
  for (double phi : {0.2, 0.9}) r.check(is_weakly_symmetric(ChannelSpec::sdc(0.0, phi, 1.0, M::both)), "theta = 0");
  for (double t : {0.1, 0.3, 0.7, 1.2})
    for (double f : {M_PI / 4, -M_PI / 4, 3 * M_PI / 4})
      r.check(is_weakly_symmetric(ChannelSpec::sdc(t, f, 1.0, M::both)), "phi = pi/4 mod pi/2");
  for (double q : {1.0, 0.5}) r.check(!is_weakly_symmetric(ChannelSpec::sdc(0.3, 0.2, q, M::both)), "generic point");
  r.check(is_weakly_symmetric(ChannelSpec::z_dephase(0.2, 0.2), 0), "z dephasing");
  r.check(is_weakly_symmetric(ChannelSpec::swap(M::both)), "swap");
  return r.result();
}

// Pure chains and cylinders transmit exactly one bit.
inline SuiteResult suite_pure_protocol() {
  SuiteRecorder r("pure_protocol");
  for (std::size_t N = 1; N <= 6; ++N) r.near(coherent_info_pure(layout_1d(N)).value, 1.0, 1e-12, "chain");
  for (std::size_t Ly : {3u, 4u}) r.near(coherent_info_pure(layout_2d(3, Ly)).value, 1.0, 1e-12, "cylinder");
  return r.result();
}

// Closed forms against exact dense evaluation, and the foliated syndrome equivalence.
inline SuiteResult suite_estimators() {
  SuiteRecorder r("estimator_consistency");
  for (std::size_t N : {2u, 3u})
    for (auto [pa, pb] : {std::pair{0.0, 0.1}, {0.2, 0.05}}) {
      double dense = coherent_info_no_env_dense(layout_1d(N), ChannelSpec::z_dephase(pa, pb)).value;
      r.near(dense, ic_1d_zdephase_closed(N, pa, pb), 1e-9, "dense vs closed form");
    }
  SyndromeLattice g(5, 4);
  auto spec = ChannelSpec::z_dephase(0, 0.15);
  for (std::size_t t = 0; t < 200; ++t) {
    Rng rng = Rng(505).split(t);
    auto d = sample_disorder_2d(g, spec, rng);
    auto h = run_virtual_2d(foliate(g, d));
    r.check(h.detections == g.defects(d.m), "foliated detection events");
    r.check(h.frame_change == g.line_product(d.x), "foliated logical frame");
  }
  return r.result();
}

struct NamedSuite {
  const char* name;
  std::function<SuiteResult()> run;
};

inline std::vector<NamedSuite> all_suites() {
  return {{"cptp", suite_cptp},
          {"data_processing", suite_data_processing},
          {"gauge_invariance", suite_gauge_invariance},
          {"homology_soundness", suite_homology_soundness},
          {"weak_symmetry_sdc", suite_weak_symmetry},
          {"pure_protocol", suite_pure_protocol},
          {"estimator_consistency", suite_estimators}};
}

// Runs the named suites (all when empty). Exceptions count as failures.
inline std::vector<SuiteResult> run_selftest(const std::vector<std::string>& only = {}) {
  std::vector<SuiteResult> out;
  for (const auto& s : all_suites()) {
    if (!only.empty() && std::find(only.begin(), only.end(), s.name) == only.end()) continue;
    auto t0 = std::chrono::steady_clock::now();
    SuiteResult res;
    try {
      res = s.run();
    } catch (const std::exception& e) {
      res.name = s.name;
      res.passed = false;
      res.failures = 1;
      res.first_failure = std::string("exception: ") + e.what();
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(res);
  }
  return out;
}

}  // namespace mixspt
