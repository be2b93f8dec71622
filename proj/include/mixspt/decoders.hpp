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
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "mixspt/channels.hpp"
#include "mixspt/lattice.hpp"
#include "mixspt/matching.hpp"
#include "mixspt/protocol.hpp"
#include "mixspt/rng.hpp"
#include "mixspt/stats.hpp"

namespace mixspt {

// Saturation value standing in for an infinite log-likelihood ratio.
inline constexpr double kDeltaSaturated = 745.0;

// Per-site weights of the disorder distribution P(m, eps) ~ prod_{flipped} w_flip prod_{kept} w_keep.
// Z dephasing: (p, 1-p). SDC: (q_i, 1-q+q_i) with q_i = q(1 + r m_i)/2, r = <X> of the environment.
struct SiteWeights {
  double flip = 0, keep = 1;
  double odds() const { return flip / keep; }
  double posterior() const { return flip / (flip + keep); }
};

// <X> of the SDC environment qubit cos(phi)|0> + sin(phi)|1>.
inline double sdc_environment_x(const ChannelSpec& spec) { return std::sin(2 * spec.phi); }

inline SiteWeights site_weights(const ChannelSpec& spec, int sublattice, int m) {
  if (!spec.hits(sublattice)) return {0, 1};
  switch (spec.kind) {
    case ChannelKind::z_dephase: {
      double p = spec.strength(sublattice);
      return {p, 1 - p};
    }
    case ChannelKind::sdc: {
      double qi = spec.q * (1 + sdc_environment_x(spec) * m) / 2;
      return {qi, 1 - spec.q + qi};
    }
    default:
      throw std::invalid_argument(std::string("no disorder model for channel ") + to_string(spec.kind));
  }
}

// Flip probability of a site given its pure outcome x: Z dephasing p; SDC q(1 - r x)/2.
inline double flip_given_pure(const ChannelSpec& spec, int sublattice, int x) {
  if (!spec.hits(sublattice)) return 0;
  if (spec.kind == ChannelKind::z_dephase) return spec.strength(sublattice);
  if (spec.kind == ChannelKind::sdc) return spec.q * (1 - sdc_environment_x(spec) * x) / 2;
  throw std::invalid_argument(std::string("no disorder model for channel ") + to_string(spec.kind));
}

// ---------------------------------------------------------------------------
// 1D chain

struct Decode1D {
  std::array<int, 2> gamma_hat{1, 1};  // even, odd
  double entropy = 0;                 // H(p_{gamma|m}) in bits
};

// Z dephasing with strengths (p_a, p_b): every measured site of a sublattice is decohered.
inline Decode1D decode_1d_ml(std::span<const int> m, std::size_t N, double p_a, double p_b) {
  if (m.size() != 2 * N) throw std::invalid_argument("outcome vector must cover the 2N measured sites");
  Decode1D d;
  for (int sub = 0; sub < 2; ++sub) {
    double p = sub == 0 ? p_a : p_b;
    if (!(p >= 0 && p <= 1)) throw std::invalid_argument("flip probability must lie in [0,1]");
    double t = std::pow(1 - 2 * p, static_cast<double>(N));
    int prod = 1;
    for (std::size_t i = static_cast<std::size_t>(sub); i < m.size(); i += 2) prod *= m[i];
    d.gamma_hat[sub] = t >= 0 ? prod : -prod;
    d.entropy += h2((1 + std::abs(t)) / 2);
  }
  return d;
}

// General per-site posterior: H of the parity of independent flips with the given odds.
inline Decode1D decode_1d_posterior(std::span<const int> m, std::span<const SiteWeights> w) {
  Decode1D d;
  for (int sub = 0; sub < 2; ++sub) {
    double t = 1;
    int prod = 1;
    for (std::size_t i = static_cast<std::size_t>(sub); i < m.size(); i += 2) {
      prod *= m[i];
      t *= 1 - 2 * w[i].posterior();
    }
    d.gamma_hat[sub] = t >= 0 ? prod : -prod;
    d.entropy += h2((1 + std::abs(t)) / 2);
  }
  return d;
}

struct Disorder1D {
  std::vector<int> x, m;
  std::vector<char> flip;
};

// Pure outcomes on the 2N measured sites are independent fair coins.
inline Disorder1D sample_disorder_1d(std::size_t N, const ChannelSpec& spec, Rng& rng) {
  Disorder1D s;
  for (std::size_t i = 0; i < 2 * N; ++i) {
    int x = rng.pm1();
    bool f = rng.bernoulli(flip_given_pure(spec, Chain1D::sublattice(i), x));
    s.x.push_back(x);
    s.flip.push_back(f);
    s.m.push_back(f ? -x : x);
  }
  return s;
}

// I_c(L:RM) = I_c(L:ERM) - E_m H(p_{gamma|m}) with I_c(L:ERM) = 1 for the decomposable
// channels supported here.
inline CoherentInfoReport coherent_info_decoder_1d(std::size_t N, const ChannelSpec& spec, std::size_t n_samples,
                                                   std::uint64_t seed) {
  spec.validate();
  if (spec.kind != ChannelKind::z_dephase && spec.kind != ChannelKind::sdc)
    throw std::invalid_argument("decoder estimator supports z_dephase and sdc");
  Accumulator h, fail;
  for (std::size_t t = 0; t < n_samples; ++t) {
    Rng rng = Rng(seed).split(t);
    auto s = sample_disorder_1d(N, spec, rng);
    std::vector<SiteWeights> w;
    for (std::size_t i = 0; i < 2 * N; ++i) w.push_back(site_weights(spec, Chain1D::sublattice(i), s.m[i]));
    auto d = decode_1d_posterior(s.m, w);
    h.add(d.entropy);
    bool ok = true;
    for (int sub = 0; sub < 2; ++sub) {
      int truth = 1;
      for (std::size_t i = static_cast<std::size_t>(sub); i < 2 * N; i += 2) truth *= s.x[i];
      ok = ok && truth == d.gamma_hat[sub];
    }
    fail.add(ok ? 0.0 : 1.0);
  }
  CoherentInfoReport rep;
  rep.value = 1.0 - h.mean();
  rep.stderr_ = h.stderr_of_mean();
  rep.estimator = "decoder_mc";
  rep.n_traj = n_samples;
  rep.params = {{"channel", spec}, {"N", N}, {"seed", seed}};
  rep.extra = {{"ic_erm", 1.0}, {"mean_entropy", h.mean()}, {"failure_rate", fail.mean()}};
  return rep;
}

// ---------------------------------------------------------------------------
// 2D cylinder: plaquette syndrome graph over the decohered edges.

class SyndromeLattice {
 public:
  SyndromeLattice(std::size_t Lx, std::size_t Ly, bool noisy_boundary = false)
      : lat_(Lx, Ly), noisy_boundary_(noisy_boundary) {
    if (Lx < 3) throw std::invalid_argument("syndrome lattice needs Lx >= 3");
    n_plaq_ = static_cast<int>(lat_.n_plaquettes());
    const std::size_t ne = lat_.n_hedges() + lat_.n_vedges();
    ends_.assign(ne, {-1, -1});
    noisy_.assign(ne, 0);
    on_line_.assign(ne, 0);
    for (std::size_t c = 0; c + 1 < Lx; ++c)
      for (std::size_t r = 0; r < Ly; ++r) {
        int pid = static_cast<int>(c * Ly + r);
        for (auto q : lat_.plaquette(c, r)) {
          auto& e = ends_[slot(q)];
          (e[0] < 0 ? e[0] : e[1]) = pid;
        }
      }
    for (std::size_t s = 0; s < ne; ++s) {
      std::size_t q = qubit(s);
      bool boundary = lat_.is_vertical(q) && (lat_.column(q) == 0 || lat_.column(q) == Lx - 1);
      noisy_[s] = !boundary || noisy_boundary;
      if (ends_[s][1] < 0) ends_[s][1] = lat_.column(q) == 0 ? left_node() : right_node();
    }
    for (std::size_t c = 0; c + 1 < Lx; ++c) on_line_[slot(lat_.hedge(c, 0))] = 1;
  }

  const LiebCylinder2D& lattice() const { return lat_; }
  bool noisy_boundary() const { return noisy_boundary_; }
  std::size_t n_edges() const { return ends_.size(); }
  int n_plaquettes() const { return n_plaq_; }
  // The boundary columns of vertical edges close into two extra syndrome nodes.
  int left_node() const { return n_plaq_; }
  int right_node() const { return n_plaq_ + 1; }
  int n_nodes() const { return n_plaq_ + 2; }
  std::size_t slot(std::size_t qubit) const { return qubit - lat_.n_vertices(); }
  std::size_t qubit(std::size_t slot) const { return slot + lat_.n_vertices(); }
  std::array<int, 2> ends(std::size_t s) const { return ends_[s]; }
  bool noisy(std::size_t s) const { return noisy_[s]; }
  bool on_line(std::size_t s) const { return on_line_[s]; }

  // Nodes whose outcome product is -1 (pure outcomes give +1 on every node).
  std::vector<int> defects(std::span<const int> m_edges) const {
    std::vector<int> par(n_nodes(), 1);
    for (std::size_t s = 0; s < n_edges(); ++s)
      for (int e : ends_[s]) par[e] *= m_edges[s];
    std::vector<int> out;
    for (int p = 0; p < n_nodes(); ++p)
      if (par[p] < 0) out.push_back(p);
    return out;
  }

  int line_product(std::span<const int> m_edges) const {
    int g = 1;
    for (std::size_t s = 0; s < n_edges(); ++s)
      if (on_line_[s]) g *= m_edges[s];
    return g;
  }

  // Independent zero-syndrome flip patterns on the noisy edges: stars of vertices whose
  // star is fully noisy and the loop of horizontal edges around the periodic direction.
  std::vector<std::vector<char>> cycle_basis() const {
    std::vector<std::vector<char>> cand;
    const std::size_t ne = n_edges();
    for (std::size_t c = 0; c < lat_.Lx; ++c)
      for (std::size_t r = 0; r < lat_.Ly; ++r) {
        std::vector<char> star(ne, 0);
        bool ok = true;
        auto add = [&](std::size_t q) {
          star[slot(q)] = 1;
          ok = ok && noisy_[slot(q)];
        };
        if (c > 0) add(lat_.hedge(c - 1, r));
        if (c + 1 < lat_.Lx) add(lat_.hedge(c, r));
        add(lat_.vedge(c, r));
        add(lat_.vedge(c, r + lat_.Ly - 1));
        if (ok) cand.push_back(std::move(star));
      }
    std::vector<char> loop(ne, 0);
    for (std::size_t r = 0; r < lat_.Ly; ++r) loop[slot(lat_.hedge(0, r))] = 1;
    cand.push_back(std::move(loop));
    std::vector<std::vector<char>> basis, reduced;
    std::vector<std::size_t> pivots;
    for (auto& v : cand) {
      auto w = v;
      for (std::size_t i = 0; i < reduced.size(); ++i)
        if (w[pivots[i]])
          for (std::size_t s = 0; s < ne; ++s) w[s] ^= reduced[i][s];
      auto it = std::find(w.begin(), w.end(), 1);
      if (it == w.end()) continue;
      pivots.push_back(static_cast<std::size_t>(it - w.begin()));
      reduced.push_back(std::move(w));
      basis.push_back(std::move(v));
    }
    return basis;
  }

 private:
  LiebCylinder2D lat_;
  bool noisy_boundary_;
  int n_plaq_ = 0;
  std::vector<std::array<int, 2>> ends_;
  std::vector<char> noisy_, on_line_;
};

struct ErrorModel {
  std::vector<SiteWeights> w;  // per edge slot; noiseless edges have flip = 0
};

inline ErrorModel error_model(const SyndromeLattice& g, const ChannelSpec& spec, std::span<const int> m_edges) {
  spec.validate();
  ErrorModel em;
  for (std::size_t s = 0; s < g.n_edges(); ++s)
    em.w.push_back(g.noisy(s) ? site_weights(spec, 1, m_edges[s]) : SiteWeights{0, 1});
  return em;
}

struct Disorder2D {
  std::vector<int> x, m;      // per edge slot
  std::vector<char> flip;
};

// Pure edge outcomes are gauge configurations x_e = s_a s_b of random vertex signs.
inline Disorder2D sample_disorder_2d(const SyndromeLattice& g, const ChannelSpec& spec, Rng& rng) {
  const auto& lat = g.lattice();
  std::vector<int> sigma(lat.n_vertices());
  for (auto& s : sigma) s = rng.pm1();
  Disorder2D d;
  for (std::size_t s = 0; s < g.n_edges(); ++s) {
    auto ab = lat.endpoints(g.qubit(s));
    int x = sigma[ab[0]] * sigma[ab[1]];
    bool f = g.noisy(s) && rng.bernoulli(flip_given_pure(spec, 1, x));
    d.x.push_back(x);
    d.flip.push_back(f);
    d.m.push_back(f ? -x : x);
  }
  return d;
}

struct MatchingDecode {
  std::vector<char> correction;  // per edge slot
  int gamma_line_hat = 1;
  double weight = 0;
  std::size_t n_defects = 0;
};

namespace decoder_detail {

inline constexpr double kWeightScale = 65536.0;

struct Paths {
  std::vector<std::int64_t> dist;
  std::vector<int> via;  // edge slot used to reach each node
};

inline Paths dijkstra(const SyndromeLattice& g, const std::vector<std::vector<std::pair<int, int>>>& adj,
                      const std::vector<std::int64_t>& cost, int src) {
  const int nn = g.n_nodes();
  Paths p{std::vector<std::int64_t>(nn, std::numeric_limits<std::int64_t>::max()), std::vector<int>(nn, -1)};
  using Item = std::pair<std::int64_t, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  p.dist[src] = 0;
  pq.push({0, src});
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d != p.dist[u]) continue;
    for (auto [v, s] : adj[u]) {
      std::int64_t nd = d + cost[s];
      if (nd < p.dist[v]) {
        p.dist[v] = nd;
        p.via[v] = s;
        pq.push({nd, v});
      }
    }
  }
  return p;
}

inline int other_end(const SyndromeLattice& g, std::size_t s, int node) {
  auto e = g.ends(s);
  return e[0] == node ? e[1] : e[0];
}

}  // namespace decoder_detail

// Minimum-weight perfect matching of the defects with shortest-path costs -ln(odds) per edge.
inline MatchingDecode decode_2d_matching(const SyndromeLattice& g, std::span<const int> m_edges,
                                         const ErrorModel& model) {
  using namespace decoder_detail;
  MatchingDecode out;
  out.correction.assign(g.n_edges(), 0);
  auto defects = g.defects(m_edges);
  out.n_defects = defects.size();
  std::vector<std::vector<std::pair<int, int>>> adj(g.n_nodes());
  std::vector<std::int64_t> cost(g.n_edges(), 0);
  for (std::size_t s = 0; s < g.n_edges(); ++s) {
    const auto& w = model.w[s];
    if (w.flip <= 0) continue;
    double lw = -std::log(w.odds());
    if (lw < 0) throw std::invalid_argument("flip odds above one are not supported by matching");
    cost[s] = static_cast<std::int64_t>(std::llround(lw * kWeightScale));
    auto e = g.ends(s);
    adj[e[0]].push_back({e[1], static_cast<int>(s)});
    adj[e[1]].push_back({e[0], static_cast<int>(s)});
  }
  const int k = static_cast<int>(defects.size());
  if (k % 2) throw std::logic_error("odd number of defects");
  if (k == 0) {
    out.gamma_line_hat = g.line_product(m_edges);
    return out;
  }
  if (k > 200) throw SizeCapExceeded("matching limited to 200 defects");
  std::vector<Paths> paths;
  for (int d : defects) paths.push_back(dijkstra(g, adj, cost, d));
  const std::int64_t inf = std::numeric_limits<std::int64_t>::max();
  std::int64_t big = 0;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (paths[i].dist[defects[j]] != inf) big = std::max(big, paths[i].dist[defects[j]]);
  const std::int64_t unreachable = 4 * (big + 1) * (k + 1);
  std::vector<std::int64_t> c(static_cast<std::size_t>(k) * k, 0);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (i != j) {
        auto d = paths[i].dist[defects[j]];
        c[static_cast<std::size_t>(i) * k + j] = d == inf ? unreachable : d;
      }
  auto mate = min_weight_perfect_matching(k, c);
  for (int i = 0; i < k; ++i) {
    int j = mate[i];
    if (i > j) continue;
    if (c[static_cast<std::size_t>(i) * k + j] >= unreachable) throw std::logic_error("defects cannot be paired");
    int node = defects[j];
    while (node != defects[i]) {
      int s = paths[i].via[node];
      out.correction[s] ^= 1;
      out.weight += static_cast<double>(cost[s]) / kWeightScale;
      node = other_end(g, static_cast<std::size_t>(s), node);
    }
  }
  int gamma = 1;
  for (std::size_t s = 0; s < g.n_edges(); ++s)
    if (g.on_line(s)) gamma *= out.correction[s] ? -m_edges[s] : m_edges[s];
  out.gamma_line_hat = gamma;
  return out;
}

struct ClassLikelihoods {
  std::array<double, 2> log_p{};  // log P(m, class) for the line-parity classes 0 (no flip) and 1
  std::array<double, 2> p{};
  int chosen = 0;
  double delta = 0;
  bool delta_saturated = false;
  int gamma_line_hat = 1;
  double posterior_entropy = 0;  // H(p_{gamma_line|m}) in bits
};

// Exhaustive sum over every flip pattern consistent with the syndrome, grouped by
// the parity of flips on the line. Weights are unnormalised by the uniform pure-outcome
// measure; class probabilities are normalised by 2^{-(#vertices - 1)}.
inline ClassLikelihoods class_probability_exact(const SyndromeLattice& g, std::span<const int> m_edges,
                                                const ErrorModel& model) {
  auto basis = g.cycle_basis();
  if (basis.size() > 24) throw SizeCapExceeded("exact class probability limited to small lattices");
  auto dec = decode_2d_matching(g, m_edges, model);
  const std::size_t ne = g.n_edges();
  std::array<double, 2> mx{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  std::vector<double> lf(ne), lk(ne);
  for (std::size_t s = 0; s < ne; ++s) {
    lf[s] = model.w[s].flip > 0 ? std::log(model.w[s].flip) : -std::numeric_limits<double>::infinity();
    lk[s] = model.w[s].keep > 0 ? std::log(model.w[s].keep) : -std::numeric_limits<double>::infinity();
  }
  std::vector<std::vector<double>> terms(2);
  std::vector<char> eps(ne);
  const std::size_t nb = basis.size();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << nb); ++mask) {
    std::copy(dec.correction.begin(), dec.correction.end(), eps.begin());
    for (std::size_t b = 0; b < nb; ++b)
      if ((mask >> b) & 1u)
        for (std::size_t s = 0; s < ne; ++s) eps[s] ^= basis[b][s];
    double lw = 0;
    int par = 0;
    for (std::size_t s = 0; s < ne; ++s) {
      if (eps[s]) {
        lw += lf[s];
        par ^= g.on_line(s);
      } else if (model.w[s].flip > 0) {
        lw += lk[s];
      }
    }
    if (lw == -std::numeric_limits<double>::infinity()) continue;
    terms[par].push_back(lw);
    mx[par] = std::max(mx[par], lw);
  }
  ClassLikelihoods out;
  const double norm = (static_cast<double>(g.lattice().n_vertices()) - 1) * std::log(2.0);
  for (int c = 0; c < 2; ++c) {
    if (terms[c].empty()) {
      out.log_p[c] = -std::numeric_limits<double>::infinity();
      out.p[c] = 0;
      continue;
    }
    double s = 0;
    for (double t : terms[c]) s += std::exp(t - mx[c]);
    out.log_p[c] = mx[c] + std::log(s) - norm;
    out.p[c] = std::exp(out.log_p[c]);
  }
  out.chosen = out.log_p[1] > out.log_p[0] ? 1 : 0;
  const double lo = out.log_p[1 - out.chosen], hi = out.log_p[out.chosen];
  if (lo == -std::numeric_limits<double>::infinity() || hi - lo > kDeltaSaturated) {
    out.delta = kDeltaSaturated;
    out.delta_saturated = true;
  } else {
    out.delta = hi - lo;
  }
  double post1 = 1.0 / (1.0 + std::exp(std::clamp(out.log_p[0] - out.log_p[1], -700.0, 700.0)));
  if (out.log_p[1] == -std::numeric_limits<double>::infinity()) post1 = 0;
  if (out.log_p[0] == -std::numeric_limits<double>::infinity()) post1 = 1;
  out.posterior_entropy = h2(post1);
  int observed = g.line_product(m_edges);
  out.gamma_line_hat = out.chosen ? -observed : observed;
  return out;
}

// Entropy of the 0-form (vertex) charge: vertex flips leave no syndrome.
inline double gamma_v_entropy(std::size_t n_measured_vertices, double p_v) {
  return h2((1 + std::pow(1 - 2 * p_v, static_cast<double>(n_measured_vertices))) / 2);
}

// ---------------------------------------------------------------------------
// Monte Carlo over the disorder distribution.

struct DecoderStats {
  Proportion failures;
  Accumulator entropy;  // exact H(p_{gamma|m}) when available
  Accumulator delta;
  std::size_t saturated = 0;
  bool exact = false;
};

inline DecoderStats run_decoder_2d(const SyndromeLattice& g, const ChannelSpec& spec, std::size_t n_samples,
                                   std::uint64_t seed, bool exact_classes) {
  DecoderStats st;
  st.exact = exact_classes;
  for (std::size_t t = 0; t < n_samples; ++t) {
    Rng rng = Rng(seed).split(t);
    auto d = sample_disorder_2d(g, spec, rng);
    auto model = error_model(g, spec, d.m);
    int truth = g.line_product(d.x);
    int guess;
    if (exact_classes) {
      auto cl = class_probability_exact(g, d.m, model);
      guess = cl.gamma_line_hat;
      st.entropy.add(cl.posterior_entropy);
      st.delta.add(cl.delta);
      st.saturated += cl.delta_saturated;
    } else {
      guess = decode_2d_matching(g, d.m, model).gamma_line_hat;
    }
    st.failures.trials++;
    st.failures.hits += guess != truth;
  }
  return st;
}

// I_c(L:RM) = 1 - E_m H(p_{gamma|m}) on the 2D cylinder. Exact class posteriors when the
// lattice is small enough; otherwise the Fano bound 1 - h2(P_fail) from matching.
inline CoherentInfoReport coherent_info_decoder_2d(std::size_t Lx, std::size_t Ly, const ChannelSpec& spec,
                                                   std::size_t n_samples, std::uint64_t seed,
                                                   bool noisy_boundary = false) {
  SyndromeLattice g(Lx, Ly, noisy_boundary);
  bool exact = g.cycle_basis().size() <= 16;
  auto st = run_decoder_2d(g, spec, n_samples, seed, exact);
  CoherentInfoReport rep;
  rep.estimator = "decoder_mc";
  rep.n_traj = n_samples;
  rep.params = {{"channel", spec}, {"Lx", Lx}, {"Ly", Ly}, {"noisy_boundary", noisy_boundary}, {"seed", seed}};
  double pf = st.failures.value();
  if (exact) {
    rep.value = 1.0 - st.entropy.mean();
    rep.stderr_ = st.entropy.stderr_of_mean();
  } else {
    rep.value = 1.0 - h2(std::min(pf, 0.5));
    double dh = pf > 0 && pf < 0.5 ? std::abs(std::log2((1 - pf) / pf)) : 0.0;
    rep.stderr_ = dh * st.failures.stderr_();
    rep.lower_bound = true;
  }
  rep.extra = {{"ic_erm", 1.0}, {"failure_rate", pf}, {"failure_stderr", st.failures.stderr_()},
               {"class_posterior", exact ? "exact" : "fano_bound"}};
  return rep;
}

// ---------------------------------------------------------------------------
// Threshold from crossings of failure-rate curves.

struct ThresholdPoint {
  std::size_t L = 0;
  double p = 0;
  std::size_t n = 0, failures = 0;
};

class NoCrossing : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ThresholdEstimate {
  double p_c = std::numeric_limits<double>::quiet_NaN();
  double ci_low = std::numeric_limits<double>::quiet_NaN();
  double ci_high = std::numeric_limits<double>::quiet_NaN();
  std::size_t n_boot = 0, n_boot_failed = 0;
  std::vector<double> crossings;
};

namespace decoder_detail {

// Mean of the crossings of consecutive sizes; NaN when some pair does not cross.
inline double crossing(const std::vector<std::size_t>& Ls, const std::vector<double>& ps,
                       const std::vector<std::vector<double>>& f, std::vector<double>* each = nullptr) {
  double sum = 0;
  int cnt = 0;
  for (std::size_t a = 0; a + 1 < Ls.size(); ++a) {
    double found = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i + 1 < ps.size(); ++i) {
      double d0 = f[a + 1][i] - f[a][i], d1 = f[a + 1][i + 1] - f[a][i + 1];
      if (d0 <= 0 && d1 > 0) {
        found = ps[i] + (ps[i + 1] - ps[i]) * (-d0) / (d1 - d0);
        break;
      }
    }
    if (each) each->push_back(found);
    if (std::isnan(found)) return found;
    sum += found;
    ++cnt;
  }
  return sum / cnt;
}

// Point estimate plus percentile interval over resampled curves. Throws NoCrossing when the
// observed curves do not cross inside the grid.
template <class Resample>
ThresholdEstimate bootstrap_crossing(const std::vector<std::size_t>& Ls, const std::vector<double>& ps,
                                     const std::vector<std::vector<double>>& f, std::size_t n_boot, Resample resample) {
  ThresholdEstimate est;
  est.p_c = crossing(Ls, ps, f, &est.crossings);
  if (std::isnan(est.p_c)) throw NoCrossing("curves do not cross inside the strength grid");
  std::vector<double> boots;
  for (std::size_t b = 0; b < n_boot; ++b) {
    auto fb = f;
    resample(fb);
    double pc = crossing(Ls, ps, fb);
    if (std::isnan(pc)) ++est.n_boot_failed;
    else boots.push_back(pc);
  }
  est.n_boot = n_boot;
  if (!boots.empty()) {
    std::sort(boots.begin(), boots.end());
    auto q = [&](double x) { return boots[static_cast<std::size_t>(x * static_cast<double>(boots.size() - 1))]; };
    est.ci_low = q(0.025);
    est.ci_high = q(0.975);
  }
  return est;
}

}  // namespace decoder_detail

// Points must form a full (L, p) grid. Parametric bootstrap over binomial counts.
inline ThresholdEstimate estimate_threshold(const std::vector<ThresholdPoint>& pts, std::size_t n_boot,
                                            std::uint64_t seed) {
  std::vector<std::size_t> Ls;
  std::vector<double> ps;
  for (const auto& p : pts) {
    if (std::find(Ls.begin(), Ls.end(), p.L) == Ls.end()) Ls.push_back(p.L);
    if (std::find(ps.begin(), ps.end(), p.p) == ps.end()) ps.push_back(p.p);
  }
  std::sort(Ls.begin(), Ls.end());
  std::sort(ps.begin(), ps.end());
  if (Ls.size() < 2 || ps.size() < 2) throw std::invalid_argument("threshold needs two sizes and two strengths");
  std::vector<std::vector<const ThresholdPoint*>> grid(Ls.size(), std::vector<const ThresholdPoint*>(ps.size(), nullptr));
  for (const auto& p : pts) {
    auto a = std::find(Ls.begin(), Ls.end(), p.L) - Ls.begin();
    auto b = std::find(ps.begin(), ps.end(), p.p) - ps.begin();
    grid[a][b] = &p;
  }
  std::vector<std::vector<double>> f(Ls.size(), std::vector<double>(ps.size()));
  for (std::size_t a = 0; a < Ls.size(); ++a)
    for (std::size_t b = 0; b < ps.size(); ++b) {
      if (!grid[a][b]) throw std::invalid_argument("threshold grid is incomplete");
      f[a][b] = static_cast<double>(grid[a][b]->failures) / static_cast<double>(grid[a][b]->n);
    }
  Rng rng(seed);
  return decoder_detail::bootstrap_crossing(Ls, ps, f, n_boot, [&](std::vector<std::vector<double>>& fb) {
    for (std::size_t i = 0; i < Ls.size(); ++i)
      for (std::size_t j = 0; j < ps.size(); ++j) {
        std::binomial_distribution<std::size_t> bin(grid[i][j]->n, f[i][j]);
        auto eng = std::mt19937_64(rng.next());
        fb[i][j] = static_cast<double>(bin(eng)) / static_cast<double>(grid[i][j]->n);
      }
  });
}

}  // namespace mixspt
