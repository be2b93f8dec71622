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

// Decohered cluster states read as noisy evolution in virtual time. In 1D the bulk
// measurements teleport one logical qubit site by site; in 2D they run rounds of a ring
// repetition code whose parity checks are the vertical-edge outcomes.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mixspt/decoders.hpp"
#include "mixspt/dense.hpp"
#include "mixspt/lattice.hpp"
#include "mixspt/protocol.hpp"
#include "mixspt/rng.hpp"
#include "mixspt/stabilizer.hpp"
#include "mixspt/stats.hpp"

namespace mixspt {

namespace virtual_detail {

inline void check_strength(double p, const char* what) {
  if (!(p >= 0 && p <= 0.5)) throw std::invalid_argument(std::string(what) + " must lie in [0, 0.5]");
}

}  // namespace virtual_detail

// ---------------------------------------------------------------------------
// 1D: one virtual qubit, one step per measured site.

// Measuring site k in the X basis maps the virtual state psi to X^r H psi, r the recorded
// outcome. A Z error on the site before its measurement acts as Z on psi before the step.
struct VirtualStep {
  int sublattice = 0;
  bool recorded = false;  // outcome bit, 1 = minus
  bool error = false;
};

struct VirtualEvolution {
  std::vector<VirtualStep> steps;
};

// Born outcomes of the pure chain are uniform; errors hit sublattice a (even sites) with
// p_a and b (odd sites) with p_b.
inline VirtualEvolution sample_virtual_1d(std::size_t N, double p_a, double p_b, Rng& rng) {
  virtual_detail::check_strength(p_a, "p_a");
  virtual_detail::check_strength(p_b, "p_b");
  VirtualEvolution ev;
  for (std::size_t k = 0; k < 2 * N; ++k) {
    VirtualStep s;
    s.sublattice = static_cast<int>(k % 2);
    s.error = rng.bernoulli(s.sublattice ? p_b : p_a);
    s.recorded = rng.coin();
    ev.steps.push_back(s);
  }
  return ev;
}

// Reference qubit 0, virtual qubit 1; starts in a Bell pair, runs the steps, then undoes
// every step with the recorded outcomes.
inline Eigen::Vector4cd run_virtual_1d(const VirtualEvolution& ev) {
  Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
  v(0) = v(3) = 1 / std::numbers::sqrt2;
  auto on_virtual = [&v](const Eigen::Matrix2cd& u) {
    for (int a = 0; a < 2; ++a) {
      cplx x = v(a), y = v(a | 2);
      v(a) = u(0, 0) * x + u(0, 1) * y;
      v(a | 2) = u(1, 0) * x + u(1, 1) * y;
    }
  };
  const Eigen::Matrix2cd H = channel_detail::hadamard(), X = pauli_matrix('X'), Z = pauli_matrix('Z');
  for (const auto& s : ev.steps) {
    if (s.error) on_virtual(Z);
    on_virtual(H);
    if (s.recorded) on_virtual(X);
  }
  for (auto it = ev.steps.rbegin(); it != ev.steps.rend(); ++it) {
    if (it->recorded) on_virtual(X);
    on_virtual(H);
  }
  return v;
}

// Which of (1 x P)|Phi+>, P = I, X, Z, Y, the corrected state is.
inline int bell_class(const Eigen::Vector4cd& v) {
  const double s = 1 / std::numbers::sqrt2;
  const std::array<std::array<cplx, 4>, 4> bell{{{s, 0, 0, s}, {0, s, s, 0}, {s, 0, 0, -s}, {0, cplx(0, -s), cplx(0, s), 0}}};
  for (int k = 0; k < 4; ++k) {
    cplx ov = 0;
    for (int i = 0; i < 4; ++i) ov += std::conj(bell[k][i]) * v(i);
    if (std::abs(std::abs(ov) - 1) < 1e-9) return k;
  }
  throw InvariantViolation("virtual evolution left the Bell frame");
}

// Coherent information of the virtual channel, S(virtual) - S(ref, virtual) of the
// sample-averaged corrected state. The entropy carries the Miller-Madow correction; the
// error combines the delta-method spread with the spread of that correction.
inline CoherentInfoReport simulate_virtual_1d(std::size_t N, double p_a, double p_b, std::size_t n_samples,
                                              std::uint64_t seed) {
  if (N == 0) throw std::invalid_argument("chain needs N >= 1");
  if (n_samples == 0) throw std::invalid_argument("n_samples must be positive");
  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
  std::array<std::size_t, 4> counts{};
  for (std::size_t t = 0; t < n_samples; ++t) {
    Rng rng = Rng(seed).split(t);
    auto v = run_virtual_1d(sample_virtual_1d(N, p_a, p_b, rng));
    rho += v * v.adjoint();
    ++counts[bell_class(v)];
  }
  const double n = static_cast<double>(n_samples);
  rho /= n;
  CMat virt(2, 2);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) virt(a, b) = rho(a << 1, b << 1) + rho((a << 1) | 1, (b << 1) | 1);
  const double raw = von_neumann_bits(virt) - von_neumann_bits(CMat(rho));
  double h = 0, h_sq = 0;
  std::size_t seen = 0;
  for (auto c : counts)
    if (c) {
      double w = static_cast<double>(c) / n;
      h -= w * std::log2(w);
      h_sq += w * std::log2(w) * std::log2(w);
      ++seen;
    }
  const double ln2 = std::numbers::ln2;
  const double bias = static_cast<double>(seen - 1) / (2 * n * ln2);
  const double spread = std::sqrt(2.0 * static_cast<double>(seen - 1)) / (2 * n * ln2);
  CoherentInfoReport rep;
  rep.estimator = "virtual_mc";
  rep.value = raw - bias;
  rep.stderr_ = std::sqrt(std::max(0.0, h_sq - h * h) / n + spread * spread);
  rep.n_traj = n_samples;
  rep.params = {{"N", N}, {"p_a", p_a}, {"p_b", p_b}, {"seed", seed}};
  rep.extra = {{"plug_in", raw}, {"bell_counts", counts}};
  return rep;
}

// Odd sublattice only.
inline CoherentInfoReport simulate_virtual_1d(std::size_t N, double p, std::size_t n_samples,
                                              std::uint64_t seed = 1) {
  return simulate_virtual_1d(N, 0.0, p, n_samples, seed);
}

// ---------------------------------------------------------------------------
// 2D: foliated repetition code on the Ly qubits of a ring.

// Round c measures the checks Z_r Z_{r+1} of the ring at column c (vertical edges); between
// rounds c and c+1 every ring qubit picks up a byproduct X (horizontal edges). Bit-flip
// errors corrupt the recorded byproducts, measurement errors the recorded checks.
struct VirtualNoise2D {
  std::size_t Lx = 0, Ly = 0;
  std::vector<int> initial_frame;  // per ring qubit, +-1
  std::vector<int> byproduct;      // (Lx-1) x Ly, applied byproduct +-1
  std::vector<char> data_flip;     // (Lx-1) x Ly
  std::vector<char> meas_flip;     // Lx x Ly
};

struct VirtualHistory2D {
  std::vector<int> syndrome;         // Lx x Ly recorded checks
  std::vector<int> recorded;         // (Lx-1) x Ly recorded byproducts
  std::vector<int> detections;       // syndrome-lattice node ids, ascending
  int frame_change = 1;              // applied byproduct product on ring qubit 0
};

inline VirtualHistory2D run_virtual_2d(const VirtualNoise2D& nz) {
  const std::size_t Lx = nz.Lx, Ly = nz.Ly;
  std::vector<int> frame = nz.initial_frame;
  VirtualHistory2D h;
  h.syndrome.resize(Lx * Ly);
  h.recorded.resize((Lx - 1) * Ly);
  for (std::size_t c = 0; c < Lx; ++c) {
    for (std::size_t r = 0; r < Ly; ++r) {
      int s = frame[r] * frame[(r + 1) % Ly];
      h.syndrome[c * Ly + r] = nz.meas_flip[c * Ly + r] ? -s : s;
    }
    if (c + 1 == Lx) break;
    for (std::size_t r = 0; r < Ly; ++r) {
      int b = nz.byproduct[c * Ly + r];
      frame[r] *= b;
      h.recorded[c * Ly + r] = nz.data_flip[c * Ly + r] ? -b : b;
    }
    h.frame_change *= nz.byproduct[c * Ly];
  }
  // A check flips between rounds by the recorded byproducts on its two qubits.
  for (std::size_t c = 0; c + 1 < Lx; ++c)
    for (std::size_t r = 0; r < Ly; ++r) {
      int d = h.syndrome[c * Ly + r] * h.syndrome[(c + 1) * Ly + r] * h.recorded[c * Ly + r] *
              h.recorded[c * Ly + (r + 1) % Ly];
      if (d < 0) h.detections.push_back(static_cast<int>(c * Ly + r));
    }
  // Products of all checks in the first and last rounds are +1 on a noiseless ring.
  const int n_plaq = static_cast<int>((Lx - 1) * Ly);
  for (auto [c, node] : {std::pair<std::size_t, int>{0, n_plaq}, {Lx - 1, n_plaq + 1}}) {
    int prod = 1;
    for (std::size_t r = 0; r < Ly; ++r) prod *= h.syndrome[c * Ly + r];
    if (prod < 0) h.detections.push_back(node);
  }
  return h;
}

// Recorded outcomes in syndrome-lattice edge order (horizontal slots, then vertical).
inline std::vector<int> recorded_outcomes(const SyndromeLattice& g, const VirtualHistory2D& h) {
  const auto& lat = g.lattice();
  std::vector<int> m(g.n_edges());
  for (std::size_t c = 0; c < lat.Lx; ++c)
    for (std::size_t r = 0; r < lat.Ly; ++r) {
      if (c + 1 < lat.Lx) m[g.slot(lat.hedge(c, r))] = h.recorded[c * lat.Ly + r];
      m[g.slot(lat.vedge(c, r))] = h.syndrome[c * lat.Ly + r];
    }
  return m;
}

inline VirtualNoise2D sample_virtual_noise_2d(const SyndromeLattice& g, double p_data, double p_meas, Rng& rng) {
  virtual_detail::check_strength(p_data, "p_data");
  virtual_detail::check_strength(p_meas, "p_meas");
  const auto& lat = g.lattice();
  VirtualNoise2D nz{lat.Lx, lat.Ly, {}, {}, {}, {}};
  for (std::size_t r = 0; r < lat.Ly; ++r) nz.initial_frame.push_back(rng.pm1());
  for (std::size_t c = 0; c + 1 < lat.Lx; ++c)
    for (std::size_t r = 0; r < lat.Ly; ++r) {
      nz.byproduct.push_back(rng.pm1());
      nz.data_flip.push_back(g.noisy(g.slot(lat.hedge(c, r))) && rng.bernoulli(p_data));
    }
  for (std::size_t c = 0; c < lat.Lx; ++c)
    for (std::size_t r = 0; r < lat.Ly; ++r)
      nz.meas_flip.push_back(g.noisy(g.slot(lat.vedge(c, r))) && rng.bernoulli(p_meas));
  return nz;
}

// Reads a cylinder disorder realization as virtual-time noise. The pure outcomes must be a
// gauge configuration: the checks of every round are the ring frame's parities.
inline VirtualNoise2D foliate(const SyndromeLattice& g, const Disorder2D& d) {
  const auto& lat = g.lattice();
  const std::size_t Lx = lat.Lx, Ly = lat.Ly;
  VirtualNoise2D nz{Lx, Ly, {}, {}, {}, {}};
  std::vector<int> frame(Ly, 1);
  for (std::size_t r = 0; r + 1 < Ly; ++r) frame[r + 1] = frame[r] * d.x[g.slot(lat.vedge(0, r))];
  nz.initial_frame = frame;
  for (std::size_t c = 0; c < Lx; ++c) {
    for (std::size_t r = 0; r < Ly; ++r) {
      std::size_t v = g.slot(lat.vedge(c, r));
      if (d.x[v] != frame[r] * frame[(r + 1) % Ly])
        throw InvariantViolation("pure outcomes are not a gauge configuration");
      nz.meas_flip.push_back(d.flip[v]);
    }
    if (c + 1 == Lx) break;
    for (std::size_t r = 0; r < Ly; ++r) {
      std::size_t hs = g.slot(lat.hedge(c, r));
      nz.byproduct.push_back(d.x[hs]);
      nz.data_flip.push_back(d.flip[hs]);
      frame[r] *= d.x[hs];
    }
  }
  return nz;
}

// Direct simulation: X measurements of every edge qubit of the cylinder cluster state,
// then Z-dephasing flips of strength p on the noisy edges.
inline Disorder2D sample_cluster_disorder_2d(const SyndromeLattice& g, double p, Rng& rng) {
  virtual_detail::check_strength(p, "p");
  const auto& lat = g.lattice();
  StabilizerState s = build_cluster_2d(lat.Lx, lat.Ly);
  const std::size_t n = lat.n_qubits();
  Disorder2D d;
  for (std::size_t e = 0; e < g.n_edges(); ++e) {
    int x = s.measure(PauliString::single(n, g.qubit(e), 'X'), rng).outcome;
    bool f = g.noisy(e) && rng.bernoulli(p);
    d.x.push_back(x);
    d.flip.push_back(f);
    d.m.push_back(f ? -x : x);
  }
  return d;
}

enum class VirtualNoiseSource { native, decoder_disorder, cluster_state };

struct Virtual2DOptions {
  double p_meas = -1;  // negative: equal to the data strength
  VirtualNoiseSource source = VirtualNoiseSource::native;
  bool noisy_boundary = false;
};

struct Virtual2DReport {
  Proportion failures;
  double survival() const { return 1 - failures.value(); }
  nlohmann::json params = nlohmann::json::object();
};

inline void to_json(nlohmann::json& j, const Virtual2DReport& r) {
  j = {{"model", "virtual"}, {"failure_rate", r.failures.value()}, {"stderr", r.failures.stderr_()},
       {"survival", r.survival()}, {"n_samples", r.failures.trials}, {"params", r.params}};
}

inline const char* to_string(VirtualNoiseSource s) {
  switch (s) {
    case VirtualNoiseSource::native: return "native";
    case VirtualNoiseSource::decoder_disorder: return "decoder_disorder";
    case VirtualNoiseSource::cluster_state: return "cluster_state";
  }
  return "?";
}

// Logical failure of the foliated repetition code under matching: the decoder's estimate of
// ring qubit 0's frame change disagrees with the applied one. Every sample's detection
// events are checked against the plaquette syndromes of the recorded outcomes.
inline Virtual2DReport simulate_virtual_2d(std::size_t Lx, std::size_t Ly, double p, std::size_t n_samples,
                                           std::uint64_t seed, const Virtual2DOptions& opt = {}) {
  virtual_detail::check_strength(p, "p");
  const double pm = opt.p_meas < 0 ? p : opt.p_meas;
  virtual_detail::check_strength(pm, "p_meas");
  if (opt.source != VirtualNoiseSource::native && pm != p)
    throw std::invalid_argument("shared noise sources use equal data and measurement strengths");
  SyndromeLattice g(Lx, Ly, opt.noisy_boundary);
  const auto& lat = g.lattice();
  ErrorModel model;
  for (std::size_t s = 0; s < g.n_edges(); ++s) {
    double q = lat.is_vertical(g.qubit(s)) ? pm : p;
    model.w.push_back(g.noisy(s) ? SiteWeights{q, 1 - q} : SiteWeights{0, 1});
  }
  const auto spec = ChannelSpec::z_dephase(0, p);
  Virtual2DReport rep;
  for (std::size_t t = 0; t < n_samples; ++t) {
    Rng rng = Rng(seed).split(t);
    VirtualNoise2D nz;
    switch (opt.source) {
      case VirtualNoiseSource::native: nz = sample_virtual_noise_2d(g, p, pm, rng); break;
      case VirtualNoiseSource::decoder_disorder: nz = foliate(g, sample_disorder_2d(g, spec, rng)); break;
      case VirtualNoiseSource::cluster_state: nz = foliate(g, sample_cluster_disorder_2d(g, p, rng)); break;
    }
    auto h = run_virtual_2d(nz);
    auto m = recorded_outcomes(g, h);
    if (h.detections != g.defects(m)) throw InvariantViolation("detection events differ from plaquette syndromes");
    int guess = decode_2d_matching(g, m, model).gamma_line_hat;
    rep.failures.trials++;
    rep.failures.hits += guess != h.frame_change;
  }
  rep.params = {{"Lx", Lx}, {"Ly", Ly}, {"p", p}, {"p_meas", pm}, {"source", to_string(opt.source)},
                {"noisy_boundary", opt.noisy_boundary}, {"seed", seed}};
  return rep;
}

}  // namespace mixspt
