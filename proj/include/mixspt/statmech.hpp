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
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mixspt/decoders.hpp"
#include "mixspt/dense.hpp"
#include "mixspt/rng.hpp"
#include "mixspt/stats.hpp"

namespace mixspt {

inline constexpr std::size_t kExactMaxSpins = 16;
inline constexpr std::size_t kTransferMaxWidth = 8;

// Spins (c, r) on Lx columns by Ly rows, index c*Ly + r. Columns are open; rows wrap when
// periodic. Bond order: horizontal (c,r)-(c+1,r) at c*Ly + r, then vertical (c,r)-(c,r+1)
// at (Lx-1)*Ly + c*rows + r. On a periodic lattice this matches the edge-qubit order of the
// Lieb cylinder, so bond b is edge qubit n_vertices + b.
class IsingLattice {
 public:
  IsingLattice(std::size_t Lx, std::size_t Ly, bool periodic = true) : Lx_(Lx), Ly_(Ly), periodic_(periodic) {
    if (Lx < 1 || Ly < 1) throw std::invalid_argument("Ising lattice needs positive dimensions");
    if (periodic && Ly < 3) throw std::invalid_argument("periodic rows need Ly >= 3");
    vrows_ = periodic ? Ly : Ly - 1;
    for (std::size_t c = 0; c + 1 < Lx; ++c)
      for (std::size_t r = 0; r < Ly; ++r) ends_.push_back({spin(c, r), spin(c + 1, r)});
    for (std::size_t c = 0; c < Lx; ++c)
      for (std::size_t r = 0; r < vrows_; ++r) ends_.push_back({spin(c, r), spin(c, (r + 1) % Ly)});
    nbrs_.resize(n_spins());
    for (std::size_t b = 0; b < ends_.size(); ++b) {
      nbrs_[ends_[b][0]].push_back({ends_[b][1], b});
      nbrs_[ends_[b][1]].push_back({ends_[b][0], b});
    }
  }

  std::size_t Lx() const { return Lx_; }
  std::size_t Ly() const { return Ly_; }
  bool periodic() const { return periodic_; }
  std::size_t n_spins() const { return Lx_ * Ly_; }
  std::size_t n_bonds() const { return ends_.size(); }
  std::size_t spin(std::size_t c, std::size_t r) const { return c * Ly_ + r; }
  std::size_t column(std::size_t s) const { return s / Ly_; }
  std::size_t row(std::size_t s) const { return s % Ly_; }
  std::array<std::size_t, 2> ends(std::size_t b) const { return ends_[b]; }
  std::size_t hbond(std::size_t c, std::size_t r) const { return c * Ly_ + r; }
  std::size_t vbond(std::size_t c, std::size_t r) const { return (Lx_ - 1) * Ly_ + c * vrows_ + r; }
  std::size_t vertical_rows() const { return vrows_; }
  struct Neighbour {
    std::size_t spin, bond;
  };
  const std::vector<Neighbour>& neighbours(std::size_t s) const { return nbrs_[s]; }

 private:
  std::size_t Lx_, Ly_;
  bool periodic_;
  std::size_t vrows_ = 0;
  std::vector<std::array<std::size_t, 2>> ends_;
  std::vector<std::vector<Neighbour>> nbrs_;
};

inline double nishimori_beta(double p) {
  if (!(p >= 0 && p <= 0.5)) throw std::invalid_argument("strength must lie in [0, 0.5]");
  return std::atanh(1 - 2 * p);
}

// Coupling of the perturbed model, atanh[(tanh l + t m)/(1 + t m tanh l)] with t = 1 - 2p.
inline double perturbed_coupling(double p, double lambda, int m) {
  if (lambda < 0) throw std::invalid_argument("perturbation must be non-negative");
  const double t = (1 - 2 * p) * m, tl = std::tanh(lambda);
  return std::atanh((tl + t) / (1 + tl * t));
}

// Quenched Ising instance: couplings K_b = beta J_b multiply sigma_a sigma_b in the exponent.
// Couplings may be infinite (zero temperature bonds).
struct RBIMInstance {
  IsingLattice lattice;
  std::vector<int> bonds;  // m_b, empty when built from raw couplings
  double p = std::numeric_limits<double>::quiet_NaN();
  double beta = std::numeric_limits<double>::quiet_NaN();
  double lambda = 0;
  std::vector<double> coupling;

  static RBIMInstance nishimori(const IsingLattice& lat, std::vector<int> m, double p, double lambda = 0) {
    if (m.size() != lat.n_bonds()) throw std::invalid_argument("bond vector does not match the lattice");
    RBIMInstance in{lat, std::move(m), p, nishimori_beta(p), lambda, {}};
    for (int b : in.bonds) {
      if (b != 1 && b != -1) throw std::invalid_argument("bonds must be +-1");
      in.coupling.push_back(lambda == 0 ? in.beta * b : perturbed_coupling(p, lambda, b));
    }
    return in;
  }
  static RBIMInstance with_couplings(const IsingLattice& lat, std::vector<double> K) {
    if (K.size() != lat.n_bonds()) throw std::invalid_argument("coupling vector does not match the lattice");
    RBIMInstance in{lat, {}, std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(), 0,
                    std::move(K)};
    return in;
  }
};

// Gauge transform sigma_i -> tau_i sigma_i, K_ij -> tau_i tau_j K_ij.
inline RBIMInstance gauge_transform(const RBIMInstance& in, std::span<const int> tau) {
  if (tau.size() != in.lattice.n_spins()) throw std::invalid_argument("gauge vector does not match the lattice");
  RBIMInstance out = in;
  for (std::size_t b = 0; b < in.lattice.n_bonds(); ++b) {
    auto e = in.lattice.ends(b);
    int s = tau[e[0]] * tau[e[1]];
    out.coupling[b] *= s;
    if (!out.bonds.empty()) out.bonds[b] *= s;
  }
  return out;
}

struct DisorderSample {
  std::vector<int> bonds;
  std::vector<char> flipped;  // bonds equal to -1
  double log_weight = 0;      // log-probability under the generating model (i.i.d. models only)
};

// I.i.d. bonds with P(-1) = 1/(1 + e^{2 beta}), beta = atanh(1 - 2p).
inline DisorderSample sample_nishimori(const IsingLattice& lat, double p, Rng& rng) {
  const double beta = nishimori_beta(p);
  const double pm = 1 / (1 + std::exp(2 * beta));
  DisorderSample d;
  for (std::size_t b = 0; b < lat.n_bonds(); ++b) {
    bool f = rng.bernoulli(pm);
    d.bonds.push_back(f ? -1 : 1);
    d.flipped.push_back(f);
    d.log_weight += f ? std::log(pm) : std::log1p(-pm);
  }
  return d;
}

struct Estimate {
  double value = 0, stderr_ = 0;
};

enum class CorrelationMethod { exact, transfer_matrix, metropolis };

inline const char* to_string(CorrelationMethod m) {
  switch (m) {
    case CorrelationMethod::exact: return "exact";
    case CorrelationMethod::transfer_matrix: return "transfer_matrix";
    case CorrelationMethod::metropolis: return "metropolis";
  }
  return "?";
}

struct MetropolisSchedule {
  std::size_t thermalization = 1000;  // sweeps
  std::size_t measure_every = 2;      // sweeps
  std::size_t n_measurements = 4000;
  std::size_t n_bins = 20;
  std::uint64_t seed = 1;
};

namespace statmech_detail {

// Bond factors divided by e^{|K|}: aligned with sign(K) -> 1, against -> e^{-2|K|}.
inline std::array<double, 2> bond_factors(double K) {
  if (K == 0) return {1, 1};
  double against = std::exp(-2 * std::abs(K));
  return K > 0 ? std::array<double, 2>{1, against} : std::array<double, 2>{against, 1};
}

inline double log_offset(const RBIMInstance& in) {
  double s = 0;
  for (double K : in.coupling) s += std::abs(K);
  return s;
}

}  // namespace statmech_detail

// Exhaustive sum over spin configurations (first spin pinned up; both sums carry the factor 2).
struct ExactSums {
  double log_z = 0;
  double correlation = 0;
};

inline ExactSums exact_sums(const RBIMInstance& in, std::size_t i, std::size_t j) {
  const auto& lat = in.lattice;
  const std::size_t n = lat.n_spins();
  if (n > kExactMaxSpins) throw SizeCapExceeded("exact enumeration limited to 16 spins");
  if (i >= n || j >= n) throw std::out_of_range("spin index");
  std::vector<std::array<double, 2>> f;
  for (double K : in.coupling) f.push_back(statmech_detail::bond_factors(K));
  double z = 0, c = 0;
  for (std::uint64_t cfg = 0; cfg < (std::uint64_t{1} << (n - 1)); ++cfg) {
    std::uint64_t s = cfg << 1;
    double w = 1;
    for (std::size_t b = 0; b < lat.n_bonds() && w > 0; ++b) {
      auto e = lat.ends(b);
      w *= f[b][((s >> e[0]) ^ (s >> e[1])) & 1u];
    }
    z += w;
    c += ((s >> i) ^ (s >> j)) & 1u ? -w : w;
  }
  return {std::log(2 * z) + statmech_detail::log_offset(in), c / z};
}

// Column-to-column transfer matrix; row states are Ly-bit words (bit r set = spin down).
class TransferMatrix {
 public:
  explicit TransferMatrix(const RBIMInstance& in) : in_(in) {
    const auto& lat = in.lattice;
    if (lat.Ly() > kTransferMaxWidth) throw SizeCapExceeded("transfer matrix limited to width 8");
    for (double K : in.coupling) f_.push_back(statmech_detail::bond_factors(K));
    dim_ = std::size_t{1} << lat.Ly();
  }

  // <sigma_a sigma_b> and log Z.
  std::pair<double, double> correlation(std::size_t a, std::size_t b) const {
    const auto& lat = in_.lattice;
    if (a >= lat.n_spins() || b >= lat.n_spins()) throw std::out_of_range("spin index");
    std::vector<double> plain(dim_, 1.0), ins(dim_, 1.0);
    double log_scale = 0;
    for (std::size_t c = 0; c < lat.Lx(); ++c) {
      if (c > 0) {
        horizontal(plain, c - 1);
        horizontal(ins, c - 1);
      }
      vertical(plain, c);
      vertical(ins, c);
      for (std::size_t s : {a, b})
        if (lat.column(s) == c) {
          std::size_t bit = std::size_t{1} << lat.row(s);
          for (std::size_t x = 0; x < dim_; ++x)
            if (x & bit) ins[x] = -ins[x];
        }
      double mx = *std::max_element(plain.begin(), plain.end());
      for (std::size_t x = 0; x < dim_; ++x) {
        plain[x] /= mx;
        ins[x] /= mx;
      }
      log_scale += std::log(mx);
    }
    double z = 0, num = 0;
    for (std::size_t x = 0; x < dim_; ++x) {
      z += plain[x];
      num += ins[x];
    }
    return {num / z, log_scale + std::log(z) + statmech_detail::log_offset(in_)};
  }

  // Exact Boltzmann sample by forward filtering and backward sampling.
  std::vector<int> sample(Rng& rng) const {
    const auto& lat = in_.lattice;
    std::vector<std::vector<double>> fwd(lat.Lx(), std::vector<double>(dim_, 1.0));
    for (std::size_t c = 0; c < lat.Lx(); ++c) {
      if (c > 0) {
        fwd[c] = fwd[c - 1];
        horizontal(fwd[c], c - 1);
      }
      vertical(fwd[c], c);
      double mx = *std::max_element(fwd[c].begin(), fwd[c].end());
      for (auto& v : fwd[c]) v /= mx;
    }
    std::vector<int> spins(lat.n_spins());
    std::vector<double> w = fwd[lat.Lx() - 1];
    for (std::size_t c = lat.Lx(); c-- > 0;) {
      if (c + 1 < lat.Lx()) {
        std::size_t next = row_state(spins, c + 1);
        for (std::size_t x = 0; x < dim_; ++x) {
          double v = fwd[c][x];
          for (std::size_t r = 0; r < lat.Ly() && v > 0; ++r)
            v *= f_[lat.hbond(c, r)][((x ^ next) >> r) & 1u];
          w[x] = v;
        }
      }
      double tot = 0;
      for (double v : w) tot += v;
      double u = rng.uniform() * tot;
      std::size_t pick = dim_ - 1;
      for (std::size_t x = 0; x < dim_; ++x) {
        if (u < w[x]) {
          pick = x;
          break;
        }
        u -= w[x];
      }
      while (w[pick] == 0) --pick;
      for (std::size_t r = 0; r < lat.Ly(); ++r) spins[lat.spin(c, r)] = (pick >> r) & 1u ? -1 : 1;
    }
    return spins;
  }

 private:
  std::size_t row_state(const std::vector<int>& spins, std::size_t c) const {
    std::size_t x = 0;
    for (std::size_t r = 0; r < in_.lattice.Ly(); ++r)
      if (spins[in_.lattice.spin(c, r)] < 0) x |= std::size_t{1} << r;
    return x;
  }
  void vertical(std::vector<double>& v, std::size_t c) const {
    const auto& lat = in_.lattice;
    for (std::size_t x = 0; x < dim_; ++x)
      for (std::size_t r = 0; r < lat.vertical_rows() && v[x] != 0; ++r) {
        std::size_t r2 = (r + 1) % lat.Ly();
        v[x] *= f_[lat.vbond(c, r)][((x >> r) ^ (x >> r2)) & 1u];
      }
  }
  void horizontal(std::vector<double>& v, std::size_t c) const {
    const auto& lat = in_.lattice;
    for (std::size_t r = 0; r < lat.Ly(); ++r) {
      const auto& f = f_[lat.hbond(c, r)];
      std::size_t bit = std::size_t{1} << r;
      for (std::size_t x = 0; x < dim_; ++x)
        if (!(x & bit)) {
          double a = v[x], b = v[x | bit];
          v[x] = f[0] * a + f[1] * b;
          v[x | bit] = f[1] * a + f[0] * b;
        }
    }
  }

  RBIMInstance in_;
  std::vector<std::array<double, 2>> f_;
  std::size_t dim_ = 0;
};

// Single-spin-flip Metropolis chain at the instance couplings.
class MetropolisChain {
 public:
  MetropolisChain(const RBIMInstance& in, Rng rng) : in_(in), rng_(rng), spins_(in.lattice.n_spins()) {
    for (auto& s : spins_) s = rng_.pm1();
  }

  void sweep() {
    const auto& lat = in_.lattice;
    for (std::size_t s = 0; s < lat.n_spins(); ++s) {
      double local = 0;
      for (const auto& nb : lat.neighbours(s)) local += in_.coupling[nb.bond] * spins_[nb.spin];
      // log acceptance ratio of flipping spin s
      double d = -2 * spins_[s] * local;
      if (std::isnan(d)) continue;
      if (d >= 0 || rng_.uniform() < std::exp(d)) spins_[s] = -spins_[s];
    }
  }
  const std::vector<int>& spins() const { return spins_; }

 private:
  RBIMInstance in_;
  Rng rng_;
  std::vector<int> spins_;
};

// <sigma_i sigma_j> with its standard error (zero for the exact methods). Metropolis errors come
// from equal-size bins of the measurement series.
inline Estimate correlation(const RBIMInstance& in, std::size_t i, std::size_t j, CorrelationMethod method,
                            const MetropolisSchedule& sched = {}) {
  switch (method) {
    case CorrelationMethod::exact: return {exact_sums(in, i, j).correlation, 0};
    case CorrelationMethod::transfer_matrix: return {TransferMatrix(in).correlation(i, j).first, 0};
    case CorrelationMethod::metropolis: {
      if (i >= in.lattice.n_spins() || j >= in.lattice.n_spins()) throw std::out_of_range("spin index");
      if (sched.n_bins < 2 || sched.n_measurements < sched.n_bins)
        throw std::invalid_argument("metropolis schedule needs at least two bins");
      MetropolisChain chain(in, Rng(sched.seed));
      for (std::size_t t = 0; t < sched.thermalization; ++t) chain.sweep();
      const std::size_t per_bin = sched.n_measurements / sched.n_bins;
      Accumulator bins;
      for (std::size_t b = 0; b < sched.n_bins; ++b) {
        double sum = 0;
        for (std::size_t k = 0; k < per_bin; ++k) {
          for (std::size_t t = 0; t < sched.measure_every; ++t) chain.sweep();
          sum += chain.spins()[i] * chain.spins()[j];
        }
        bins.add(sum / static_cast<double>(per_bin));
      }
      return {bins.mean(), bins.stderr_of_mean()};
    }
  }
  throw std::invalid_argument("unknown correlation method");
}

// Exact method chosen by size: enumeration up to 16 spins, else the transfer matrix.
inline double exact_correlation(const RBIMInstance& in, std::size_t i, std::size_t j) {
  if (in.lattice.n_spins() <= kExactMaxSpins) return exact_sums(in, i, j).correlation;
  return TransferMatrix(in).correlation(i, j).first;
}

inline double log_partition(const RBIMInstance& in) {
  if (in.lattice.n_spins() <= kExactMaxSpins) return exact_sums(in, 0, 0).log_z;
  return TransferMatrix(in).correlation(0, 0).second;
}

// ---------------------------------------------------------------------------
// Disorder ensemble of the perturbed model, P(m) ~ Z(m, lambda). Summing the joint weight
// exp(sum (beta m + lambda) s s) over m leaves a clean ferromagnet at coupling lambda for s;
// given s, each bond equals s_a s_b with probability 1 - p.

inline DisorderSample sample_perturbed(const IsingLattice& lat, double p, double lambda, Rng& rng) {
  if (lambda == 0) return sample_nishimori(lat, p, rng);
  nishimori_beta(p);
  auto clean = RBIMInstance::with_couplings(lat, std::vector<double>(lat.n_bonds(), lambda));
  std::vector<int> s = TransferMatrix(clean).sample(rng);
  DisorderSample d;
  d.log_weight = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t b = 0; b < lat.n_bonds(); ++b) {
    auto e = lat.ends(b);
    int m = s[e[0]] * s[e[1]] * (rng.bernoulli(p) ? -1 : 1);
    d.bonds.push_back(m);
    d.flipped.push_back(m < 0);
  }
  return d;
}

// ---------------------------------------------------------------------------
// Nishimori identity [<s_i s_j>^2] = [<s_i s_j>].

struct NishimoriCheck {
  double lhs = 0, rhs = 0;  // [<ss>^2], [<ss>]
  double lhs_stderr = 0, rhs_stderr = 0;
  double z = 0;  // mean of the paired difference over its standard error
  std::size_t n_disorder = 0;
};

inline NishimoriCheck nishimori_identity_check(const IsingLattice& lat, double p, std::size_t n_disorder,
                                               std::uint64_t seed, std::size_t i, std::size_t j) {
  Rng rng(seed);
  Accumulator sq, lin, diff;
  for (std::size_t k = 0; k < n_disorder; ++k) {
    auto d = sample_nishimori(lat, p, rng);
    double c = exact_correlation(RBIMInstance::nishimori(lat, d.bonds, p), i, j);
    sq.add(c * c);
    lin.add(c);
    diff.add(c * c - c);
  }
  NishimoriCheck out{sq.mean(), lin.mean(), sq.stderr_of_mean(), lin.stderr_of_mean(), 0, n_disorder};
  double se = diff.stderr_of_mean();
  if (se > 0) out.z = diff.mean() / se;
  else out.z = std::abs(diff.mean()) < 1e-12 ? 0 : std::numeric_limits<double>::infinity();
  return out;
}

// ---------------------------------------------------------------------------
// SDC decoding model: spins on the vertices of the Lieb cylinder, one bond per edge. Noisy
// edges carry K_e eps_e with e^{-2 K_e} = flip/keep; noiseless edges are infinitely stiff.
// <s(0,0) s(Lx-1,0)> then separates the two homology classes of the error.

inline RBIMInstance sdc_model_instance(const SyndromeLattice& g, const ErrorModel& model, std::span<const int> eps) {
  const auto& lieb = g.lattice();
  IsingLattice lat(lieb.Lx, lieb.Ly, true);
  if (eps.size() != g.n_edges()) throw std::invalid_argument("error vector does not match the lattice");
  std::vector<double> K(g.n_edges());
  for (std::size_t s = 0; s < g.n_edges(); ++s) {
    const auto& w = model.w[s];
    double k = w.flip > 0 ? 0.5 * std::log(w.keep / w.flip) : std::numeric_limits<double>::infinity();
    K[s] = eps[s] * k;
  }
  return RBIMInstance::with_couplings(lat, std::move(K));
}

// P(class of eps) / (P(class 0) + P(class 1)) from the boundary-to-boundary correlation.
inline double sdc_class_weight(const SyndromeLattice& g, const ErrorModel& model, std::span<const int> eps) {
  auto in = sdc_model_instance(g, model, eps);
  const auto& lat = in.lattice;
  double c = exact_correlation(in, lat.spin(0, 0), lat.spin(lat.Lx() - 1, 0));
  return (1 + c) / 2;
}

// ---------------------------------------------------------------------------
// Threshold scans.

enum class ScanObservable { decoder_failure, correlation_ratio };

inline const char* to_string(ScanObservable o) {
  return o == ScanObservable::decoder_failure ? "decoder_failure" : "correlation_ratio";
}

struct ScanPoint {
  std::size_t L = 0;
  double p = 0, lambda = 0;
  double value = 0, stderr_ = 0;  // failure-like: grows with p
  std::size_t n_samples = 0;
};

struct ScanResult {
  ScanObservable observable = ScanObservable::decoder_failure;
  std::vector<ScanPoint> points;
  ThresholdEstimate estimate;
};

// 1 - [<s(0,0) s(L-1,0)>^2] / [<s(0,0) s((L-1)/2,0)>^2] on an L x L cylinder: tends to 0 in the
// ordered phase and to 1 in the disordered phase. Squares keep it gauge invariant, which matters
// once lambda > 0 correlates the bonds with a random gauge.
inline ScanPoint correlation_ratio_point(std::size_t L, double p, double lambda, std::size_t n, Rng& rng) {
  IsingLattice lat(L, L, true);
  const std::size_t a = lat.spin(0, 0), far = lat.spin(L - 1, 0), mid = lat.spin((L - 1) / 2, 0);
  Accumulator cf, cm;
  std::vector<double> xf, xm;
  for (std::size_t k = 0; k < n; ++k) {
    auto d = sample_perturbed(lat, p, lambda, rng);
    auto in = RBIMInstance::nishimori(lat, d.bonds, p, lambda);
    TransferMatrix tm(in);
    double f = std::pow(tm.correlation(a, far).first, 2), m = std::pow(tm.correlation(a, mid).first, 2);
    cf.add(f);
    cm.add(m);
    xf.push_back(f);
    xm.push_back(m);
  }
  double mf = cf.mean(), mm = cm.mean();
  // delta-method error of the ratio
  double vff = cf.variance(), vmm = cm.variance(), vfm = 0;
  for (std::size_t k = 0; k < n; ++k) vfm += (xf[k] - mf) * (xm[k] - mm);
  vfm /= static_cast<double>(n > 1 ? n - 1 : 1);
  double R = mm != 0 ? mf / mm : 0;
  double var = mm != 0 ? (vff - 2 * R * vfm + R * R * vmm) / (mm * mm) / static_cast<double>(n) : 0;
  return {L, p, lambda, 1 - R, std::sqrt(std::max(0.0, var)), n};
}

// Scan points only, in (size, strength) order with both axes sorted; no crossing estimate.
inline ScanResult threshold_scan_points(std::vector<double> p_grid, std::vector<std::size_t> sizes,
                                        std::size_t n_samples, std::uint64_t seed, double lambda = 0,
                                        ScanObservable obs = ScanObservable::decoder_failure) {
  if (sizes.size() < 2) throw std::invalid_argument("threshold scan needs at least two sizes");
  if (p_grid.size() < 2) throw std::invalid_argument("threshold scan needs at least two strengths");
  if (obs == ScanObservable::decoder_failure && lambda != 0)
    throw std::invalid_argument("the matching decoder ignores the perturbation; use correlation_ratio");
  std::sort(sizes.begin(), sizes.end());
  std::sort(p_grid.begin(), p_grid.end());
  ScanResult res;
  res.observable = obs;
  Rng root(seed);
  for (std::size_t a = 0; a < sizes.size(); ++a)
    for (std::size_t b = 0; b < p_grid.size(); ++b) {
      Rng rng = root.split(a * 1000003 + b);
      ScanPoint pt;
      if (obs == ScanObservable::decoder_failure) {
        auto st = run_decoder_2d(SyndromeLattice(sizes[a], sizes[a]), ChannelSpec::z_dephase(0, p_grid[b]),
                                 n_samples, rng.next(), false);
        pt = {sizes[a], p_grid[b], 0, st.failures.value(), st.failures.stderr_(), n_samples};
      } else {
        pt = correlation_ratio_point(sizes[a], p_grid[b], lambda, n_samples, rng);
      }
      res.points.push_back(pt);
    }
  return res;
}

// Bootstrap crossing of a finished scan; throws NoCrossing when the curves never cross.
inline ThresholdEstimate scan_crossing(const ScanResult& res, std::size_t n_boot, std::uint64_t seed) {
  std::vector<std::size_t> sizes;
  std::vector<double> p_grid;
  for (const auto& pt : res.points) {
    if (std::find(sizes.begin(), sizes.end(), pt.L) == sizes.end()) sizes.push_back(pt.L);
    if (std::find(p_grid.begin(), p_grid.end(), pt.p) == p_grid.end()) p_grid.push_back(pt.p);
  }
  if (res.points.size() != sizes.size() * p_grid.size()) throw std::invalid_argument("scan is not a full grid");
  std::vector<std::vector<double>> f(sizes.size(), std::vector<double>(p_grid.size()));
  std::vector<std::vector<double>> se = f;
  for (std::size_t k = 0; k < res.points.size(); ++k) {
    f[k / p_grid.size()][k % p_grid.size()] = res.points[k].value;
    se[k / p_grid.size()][k % p_grid.size()] = res.points[k].stderr_;
  }
  Rng brng(seed ^ 0x5bd1e995ULL);
  std::normal_distribution<double> gauss;
  return decoder_detail::bootstrap_crossing(sizes, p_grid, f, n_boot, [&](std::vector<std::vector<double>>& fb) {
    auto eng = std::mt19937_64(brng.next());
    for (std::size_t i = 0; i < sizes.size(); ++i)
      for (std::size_t j = 0; j < p_grid.size(); ++j) fb[i][j] = f[i][j] + se[i][j] * gauss(eng);
  });
}

inline ScanResult threshold_scan(std::vector<double> p_grid, std::vector<std::size_t> sizes, std::size_t n_samples,
                                 std::uint64_t seed, double lambda = 0,
                                 ScanObservable obs = ScanObservable::decoder_failure, std::size_t n_boot = 200) {
  auto res = threshold_scan_points(std::move(p_grid), std::move(sizes), n_samples, seed, lambda, obs);
  res.estimate = scan_crossing(res, n_boot, seed);
  return res;
}

inline void to_json(nlohmann::json& j, const ScanPoint& p) {
  j = {{"L", p.L}, {"p", p.p}, {"lambda", p.lambda}, {"value", p.value}, {"stderr", p.stderr_}, {"n_samples", p.n_samples}};
}
inline void to_json(nlohmann::json& j, const ThresholdEstimate& e) {
  j = {{"p_c", e.p_c},       {"ci_low", e.ci_low},         {"ci_high", e.ci_high},
       {"n_boot", e.n_boot}, {"n_boot_failed", e.n_boot_failed}, {"crossings", e.crossings}};
}

}  // namespace mixspt
