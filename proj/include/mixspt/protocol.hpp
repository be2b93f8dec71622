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
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mixspt/channels.hpp"
#include "mixspt/dense.hpp"
#include "mixspt/lattice.hpp"
#include "mixspt/stats.hpp"

namespace mixspt {

struct CoherentInfoReport {
  double value = 0;
  std::string estimator;  // exact_dense | exact_stabilizer | sampled_dense | sampled_stabilizer | closed_form | decoder_mc
  double stderr_ = 0;
  std::size_t n_traj = 0;
  bool lower_bound = false;
  nlohmann::json params = nlohmann::json::object();
  nlohmann::json extra = nlohmann::json::object();
};

inline void to_json(nlohmann::json& j, const CoherentInfoReport& r) {
  j = {{"value", r.value}, {"estimator", r.estimator}, {"stderr", r.stderr_}, {"n_traj", r.n_traj},
       {"lower_bound", r.lower_bound}, {"params", r.params}, {"extra", r.extra}};
}

struct TrajectoryRecord {
  std::vector<int> m;
  double p_m = 0;
  std::vector<int> gamma;
  CMat boundary;  // reduced state on (ancilla, receiver)
};

// Products of outcomes over each charge set of the layout.
inline std::vector<int> charge_class(const ProtocolLayout& L, std::span<const int> m) {
  std::vector<long> where(L.n_system, -1);
  for (std::size_t k = 0; k < L.measured.size(); ++k) where[L.measured[k]] = static_cast<long>(k);
  std::vector<int> g;
  for (const auto& [name, sites] : L.charges) {
    int v = 1;
    for (auto s : sites) {
      if (where[s] < 0) throw std::invalid_argument("charge set " + name + " contains an unmeasured site");
      v *= m[where[s]];
    }
    g.push_back(v);
  }
  return g;
}

// Dense reduced density matrix of a stabilizer state on a small region (region[0] = low bit).
inline CMat reduced_density(const StabilizerState& s, std::span<const std::size_t> region) {
  const std::size_t n = s.n_qubits();
  if (region.size() > 12) throw SizeCapExceeded("reduced_density limited to 12 qubits");
  std::vector<char> in(n, 0);
  for (auto q : region) in[q] = 1;
  auto rows = s.generators();
  std::size_t r = 0;
  for (std::size_t q = 0; q < n; ++q) {
    if (in[q]) continue;
    for (int bit = 0; bit < 2; ++bit) {
      auto has = [&](const PauliString& p) { return bit == 0 ? p.x(q) : p.z(q); };
      std::size_t piv = r;
      while (piv < rows.size() && !has(rows[piv])) ++piv;
      if (piv == rows.size()) continue;
      std::swap(rows[piv], rows[r]);
      for (std::size_t i = 0; i < rows.size(); ++i)
        if (i != r && has(rows[i])) rows[i] *= rows[r];
      ++r;
    }
  }
  std::vector<PauliString> local;
  for (std::size_t i = r; i < rows.size(); ++i) {
    PauliString p(region.size());
    for (std::size_t j = 0; j < region.size(); ++j) p.set(j, rows[i].at(region[j]));
    p.set_phase(rows[i].phase());
    local.push_back(p);
  }
  const std::size_t d = std::size_t{1} << region.size();
  CMat rho = CMat::Zero(d, d);
  for (std::size_t mask = 0; mask < (std::size_t{1} << local.size()); ++mask) {
    PauliString g(region.size());
    for (std::size_t i = 0; i < local.size(); ++i)
      if ((mask >> i) & 1u) g *= local[i];
    rho += pauli_string_matrix(g);
  }
  return rho / static_cast<double>(d);
}
inline CMat reduced_density(const StabilizerState& s, std::initializer_list<std::size_t> region) {
  std::vector<std::size_t> r(region);
  return reduced_density(s, std::span<const std::size_t>(r));
}

// ---------------------------------------------------------------------------
// Stabilizer trajectories (pure protocol, Pauli frames)

inline std::vector<PauliString> x_measurements(const ProtocolLayout& L) {
  std::vector<PauliString> ops;
  for (auto q : L.measured) ops.push_back(PauliString::single(L.state.n_qubits(), q, 'X'));
  return ops;
}

// Depth-first enumeration of every outcome string with nonzero probability. Without
// signs, deterministic entries of m are left at 0 (the post-measurement state is the same).
template <class Leaf>
void enumerate_outcomes(const StabilizerState& s, std::span<const PauliString> ops, std::size_t k, double prob,
                        std::vector<int>& m, Leaf& leaf, bool signs = true) {
  if (k == ops.size()) {
    leaf(s, std::span<const int>(m), prob);
    return;
  }
  auto flip = s.anticommuting_generator(ops[k]);
  if (!flip) {
    m[k] = 0;
    if (signs || !s.is_pure()) {
      auto det = s.deterministic_outcome(ops[k]);
      if (!det) throw InvariantViolation("commuting measurement outside the stabilizer group of a pure state");
      m[k] = *det;
    }
    enumerate_outcomes(s, ops, k + 1, prob, m, leaf, signs);
    return;
  }
  StabilizerState c = s;
  c.measure_forced(ops[k], 1);
  m[k] = 1;
  enumerate_outcomes(c, ops, k + 1, prob * 0.5, m, leaf, signs);
  c.apply_pauli(*flip);
  m[k] = -1;
  enumerate_outcomes(c, ops, k + 1, prob * 0.5, m, leaf, signs);
}

inline std::vector<std::size_t> ancilla_receiver(const ProtocolLayout& L) {
  std::vector<std::size_t> ar{L.ancilla};
  ar.insert(ar.end(), L.receiver.begin(), L.receiver.end());
  return ar;
}

// Sum_m p_m [S(R) - S(aR)] for the pure protocol; exhaustive when n_traj == 0.
inline CoherentInfoReport coherent_info_pure(const ProtocolLayout& L, std::size_t n_traj = 0, std::uint64_t seed = 1,
                                             std::vector<TrajectoryRecord>* records = nullptr) {
  auto ops = x_measurements(L);
  auto ar = ancilla_receiver(L);
  CoherentInfoReport rep;
  rep.params = {{"lattice", L.lattice}};
  auto value = [&](const StabilizerState& s) { return s.entropy(L.receiver) - s.entropy(ar); };
  if (n_traj == 0) {
    double total = 0, ptot = 0;
    std::size_t count = 0;
    std::vector<int> m(ops.size());
    auto leaf = [&](const StabilizerState& s, std::span<const int> mm, double p) {
      total += p * value(s);
      ptot += p;
      ++count;
      if (records) records->push_back({std::vector<int>(mm.begin(), mm.end()), p, charge_class(L, mm), reduced_density(s, ar)});
    };
    enumerate_outcomes(L.state, ops, 0, 1.0, m, leaf, records != nullptr);
    if (std::abs(ptot - 1.0) > 1e-12) throw InvariantViolation("trajectory probabilities do not sum to one");
    rep.value = total;
    rep.estimator = "exact_stabilizer";
    rep.n_traj = count;
    return rep;
  }
  Accumulator acc;
  for (std::size_t t = 0; t < n_traj; ++t) {
    Rng rng = Rng(seed).split(t);
    StabilizerState s = L.state;
    for (const auto& op : ops) s.measure(op, rng);
    acc.add(value(s));
  }
  rep.value = acc.mean();
  rep.stderr_ = acc.stderr_of_mean();
  rep.estimator = "sampled_stabilizer";
  rep.n_traj = n_traj;
  return rep;
}

// Sum over groups of p_g [S(R) - S(aR)] of the averaged boundary blocks. Grouping by the full
// record gives I_c(L:RM); grouping by charge class gives I_c(L:R Gamma).
inline double coherent_info_grouped(const std::vector<TrajectoryRecord>& records, bool by_charge) {
  std::map<std::vector<int>, std::pair<double, CMat>> blocks;
  for (const auto& r : records) {
    const auto& key = by_charge ? r.gamma : r.m;
    auto it = blocks.find(key);
    if (it == blocks.end()) blocks.emplace(key, std::make_pair(r.p_m, CMat(r.p_m * r.boundary)));
    else {
      it->second.first += r.p_m;
      it->second.second += r.p_m * r.boundary;
    }
  }
  double total = 0;
  for (auto& [key, pr] : blocks) {
    if (pr.first <= 0) continue;
    auto st = DenseState::from_density(pr.second / pr.first);
    std::vector<std::size_t> rpos, all;
    for (std::size_t i = 0; i < st.n_qubits(); ++i) {
      all.push_back(i);
      if (i) rpos.push_back(i);
    }
    total += pr.first * (st.entropy(rpos) - st.entropy(all));
  }
  return total;
}

// I_c(L:R Gamma) for the pure protocol, aggregating trajectories by charge class as they stream.
inline double coherent_info_pure_given_charges(const ProtocolLayout& L) {
  auto ops = x_measurements(L);
  auto ar = ancilla_receiver(L);
  std::map<std::vector<int>, TrajectoryRecord> merged;
  std::vector<int> m(ops.size());
  auto leaf = [&](const StabilizerState& s, std::span<const int> mm, double p) {
    auto g = charge_class(L, mm);
    CMat rho = p * reduced_density(s, ar);
    auto it = merged.find(g);
    if (it == merged.end()) merged.emplace(g, TrajectoryRecord{g, p, g, rho});
    else {
      it->second.p_m += p;
      it->second.boundary += rho;
    }
  };
  enumerate_outcomes(L.state, ops, 0, 1.0, m, leaf);
  std::vector<TrajectoryRecord> rec;
  for (auto& [g, r] : merged) {
    r.boundary /= r.p_m;
    rec.push_back(std::move(r));
  }
  return coherent_info_grouped(rec, true);
}

// Pauli channels with the environment holding the error record: every error pattern is a
// Pauli frame on the pure protocol. Exhaustive over patterns when n_patterns == 0.
inline CoherentInfoReport coherent_info_with_env_pauli(const ProtocolLayout& L, const ChannelSpec& spec,
                                                       std::size_t n_patterns, std::size_t n_traj, std::uint64_t seed) {
  if (!spec.is_pauli()) throw NotPauliChannel("stabilizer route needs a Pauli channel");
  std::vector<std::size_t> sites;
  for (auto q : L.decohered)
    if (spec.hits(L.sublattice[q])) sites.push_back(q);
  const char letter = spec.kind == ChannelKind::z_dephase ? 'Z' : 'Y';
  Accumulator acc;
  double exact = 0;
  auto run = [&](const PauliString& frame, std::uint64_t s) {
    ProtocolLayout F = L;
    F.state.apply_pauli(frame);
    return coherent_info_pure(F, n_traj, s).value;
  };
  const std::size_t n = L.state.n_qubits();
  if (n_patterns == 0) {
    if (sites.size() > 16) throw SizeCapExceeded("exhaustive error patterns limited to 16 sites");
    for (std::size_t mask = 0; mask < (std::size_t{1} << sites.size()); ++mask) {
      PauliString f(n);
      double w = 1;
      for (std::size_t i = 0; i < sites.size(); ++i) {
        double p = spec.strength(L.sublattice[sites[i]]);
        if ((mask >> i) & 1u) {
          f.set(sites[i], letter);
          w *= p;
        } else {
          w *= 1 - p;
        }
      }
      if (w > 0) exact += w * run(f, seed + mask);
    }
    CoherentInfoReport rep;
    rep.value = exact;
    rep.estimator = n_traj ? "sampled_stabilizer" : "exact_stabilizer";
    rep.n_traj = std::size_t{1} << sites.size();
    rep.params = {{"channel", spec}, {"lattice", L.lattice}};
    return rep;
  }
  for (std::size_t t = 0; t < n_patterns; ++t) {
    Rng rng = Rng(seed).split(t);
    PauliString f(n);
    for (auto q : sites) {
      char c = sample_pauli_error(spec, L.sublattice[q], rng);
      if (c != 'I') f.set(q, c);
    }
    acc.add(run(f, rng.next()));
  }
  CoherentInfoReport rep;
  rep.value = acc.mean();
  rep.stderr_ = acc.stderr_of_mean();
  rep.estimator = "sampled_stabilizer";
  rep.n_traj = n_patterns;
  rep.params = {{"channel", spec}, {"lattice", L.lattice}};
  return rep;
}

// ---------------------------------------------------------------------------
// Dense protocol: system + ancilla + one purifying environment block per decohered site.

struct EnvSlot {
  std::size_t site = 0;
  std::vector<long> env_labels;
  TransformedCharge charge;
};

struct DenseProtocol {
  DenseState psi;
  std::vector<long> label;  // current qubit position -> original label
  std::vector<EnvSlot> slots;
  const ProtocolLayout* layout = nullptr;

  std::size_t pos(long lab) const {
    auto it = std::find(label.begin(), label.end(), lab);
    if (it == label.end()) throw std::logic_error("qubit label no longer present");
    return static_cast<std::size_t>(it - label.begin());
  }
};

inline DenseProtocol prepare_dense(const ProtocolLayout& L, const ChannelSpec* spec) {
  std::size_t total = L.state.n_qubits();
  std::vector<std::size_t> hit;
  if (spec) {
    spec->validate();
    for (auto q : L.decohered)
      if (spec->hits(L.sublattice[q])) {
        hit.push_back(q);
        total += purification(*spec, L.sublattice[q]).n_env;
      }
  }
  if (total > DenseState::kMaxPure)
    throw SizeCapExceeded("channel not purifiable at requested size: " + std::to_string(total) + " qubits");
  DenseProtocol dp{to_dense(L.state), {}, {}, &L};
  for (std::size_t q = 0; q < L.state.n_qubits(); ++q) dp.label.push_back(static_cast<long>(q));
  long next = static_cast<long>(L.state.n_qubits());
  for (auto q : hit) {
    auto pu = purification(*spec, L.sublattice[q]);
    EnvSlot slot;
    slot.site = q;
    slot.charge = transformed_charge(*spec, L.sublattice[q]);
    std::vector<std::size_t> targets{dp.pos(static_cast<long>(q))};
    for (std::size_t e = 0; e < pu.n_env; ++e) {
      targets.push_back(dp.label.size());
      slot.env_labels.push_back(next);
      dp.label.push_back(next++);
    }
    dp.psi = dp.psi.tensor(DenseState::from_vector(pu.env_state));
    dp.psi.apply_unitary(pu.unitary, targets);
    dp.slots.push_back(std::move(slot));
  }
  return dp;
}

// Visit every system X-outcome string (or sample one per call when rng is given).
// Leaf signature: (const DenseState&, const std::vector<long>& labels, std::span<const int> m, double p_m).
template <class Leaf>
void walk_dense(const DenseState& psi, const std::vector<long>& label, const std::vector<std::size_t>& measured,
                std::size_t k, double prob, std::vector<int>& m, Leaf& leaf, Rng* rng) {
  if (k == measured.size()) {
    leaf(psi, label, std::span<const int>(m), prob);
    return;
  }
  auto it = std::find(label.begin(), label.end(), static_cast<long>(measured[k]));
  const std::size_t pos = static_cast<std::size_t>(it - label.begin());
  std::vector<long> next_label = label;
  next_label.erase(next_label.begin() + static_cast<long>(pos));
  if (rng) {
    auto [pp, sp] = psi.collapse_qubit(pos, 'X', 1);
    int o = rng->uniform() < pp ? 1 : -1;
    m[k] = o;
    if (o == 1) {
      walk_dense(sp, next_label, measured, k + 1, prob * pp, m, leaf, rng);
    } else {
      auto [pm, sm] = psi.collapse_qubit(pos, 'X', -1);
      walk_dense(sm, next_label, measured, k + 1, prob * pm, m, leaf, rng);
    }
    return;
  }
  for (int o : {1, -1}) {
    auto [pr, st] = psi.collapse_qubit(pos, 'X', o);
    if (pr < 1e-14) continue;
    m[k] = o;
    walk_dense(st, next_label, measured, k + 1, prob * pr, m, leaf, rng);
  }
}

namespace protocol_detail {

inline std::vector<std::size_t> positions(const std::vector<long>& label, std::span<const std::size_t> which) {
  std::vector<std::size_t> out;
  for (auto q : which) {
    auto it = std::find(label.begin(), label.end(), static_cast<long>(q));
    if (it == label.end()) throw std::logic_error("qubit label missing");
    out.push_back(static_cast<std::size_t>(it - label.begin()));
  }
  return out;
}

// Sum_e p_{e|m} S(ancilla) after measuring each slot's O^(m) on its environment block.
inline double env_measured_entropy(const DenseState& psi, const std::vector<long>& label,
                                   const std::vector<EnvSlot>& slots, const std::vector<int>& site_outcome,
                                   std::size_t idx, std::size_t ancilla) {
  if (idx == slots.size()) {
    auto a = positions(label, std::vector<std::size_t>{ancilla});
    return psi.entropy(a);
  }
  const auto& slot = slots[idx];
  std::vector<std::size_t> targets;
  for (long l : slot.env_labels) targets.push_back(static_cast<std::size_t>(std::find(label.begin(), label.end(), l) - label.begin()));
  int m = site_outcome[slot.site];
  const CMat& O = slot.charge.O[m == 1 ? 0 : 1];
  double total = 0;
  for (const auto& br : psi.projective_measure(O, targets))
    total += br.prob * env_measured_entropy(br.post, label, slots, site_outcome, idx + 1, ancilla);
  return total;
}

}  // namespace protocol_detail

// I_c(L:ERM). Decomposable channels: system X outcomes first, then each environment block
// measured in its O^(m) eigenbasis. Otherwise the environment is kept as a quantum register.
inline CoherentInfoReport coherent_info_with_env(const ProtocolLayout& L, const ChannelSpec& spec,
                                                 std::size_t n_traj = 0, std::uint64_t seed = 1) {
  auto dp = prepare_dense(L, &spec);
  bool decomposable = true;
  for (const auto& s : dp.slots) decomposable = decomposable && s.charge.decomposable;
  std::vector<int> m(L.measured.size());
  std::vector<int> site_outcome(L.n_system, 0);
  double total = 0, ptot = 0;
  std::size_t count = 0;
  Accumulator acc;
  auto leaf = [&](const DenseState& psi, const std::vector<long>& label, std::span<const int> mm, double p) {
    for (std::size_t k = 0; k < L.measured.size(); ++k) site_outcome[L.measured[k]] = mm[k];
    double v;
    if (decomposable) {
      v = protocol_detail::env_measured_entropy(psi, label, dp.slots, site_outcome, 0, L.ancilla);
    } else {
      auto a = protocol_detail::positions(label, std::vector<std::size_t>{L.ancilla});
      v = psi.entropy(a);
    }
    total += p * v;
    ptot += p;
    acc.add(v);
    ++count;
  };
  CoherentInfoReport rep;
  rep.params = {{"channel", spec}, {"lattice", L.lattice}};
  rep.extra = {{"decomposable", decomposable}, {"environment", decomposable ? "measured" : "quantum"}};
  if (n_traj == 0) {
    walk_dense(dp.psi, dp.label, L.measured, 0, 1.0, m, leaf, nullptr);
    if (std::abs(ptot - 1.0) > 1e-9) throw InvariantViolation("trajectory probabilities do not sum to one");
    rep.value = total;
    rep.estimator = "exact_dense";
    rep.n_traj = count;
    return rep;
  }
  for (std::size_t t = 0; t < n_traj; ++t) {
    Rng rng = Rng(seed).split(t);
    walk_dense(dp.psi, dp.label, L.measured, 0, 1.0, m, leaf, &rng);
  }
  rep.value = acc.mean();
  rep.stderr_ = acc.stderr_of_mean();
  rep.estimator = "sampled_dense";
  rep.n_traj = n_traj;
  return rep;
}

// I_c(L:RM) = sum_m p_m [I^(m)(L:R) - S(L^(m))] with the environment traced out.
// Also reports sum_m p_m I^(m)(L:R) and the derived destroyed information
// I_dest = |L| - (sum_m p_m I^(m)(L:R) - I_c).
inline CoherentInfoReport coherent_info_no_env_dense(const ProtocolLayout& L, const ChannelSpec& spec,
                                                     std::size_t n_traj = 0, std::uint64_t seed = 1,
                                                     std::vector<TrajectoryRecord>* records = nullptr) {
  auto dp = prepare_dense(L, &spec);
  std::vector<int> m(L.measured.size());
  auto ar = ancilla_receiver(L);
  double total = 0, total_mi = 0, ptot = 0;
  std::size_t count = 0;
  Accumulator acc, acc_mi;
  std::vector<std::size_t> rloc, aloc{0}, all(ar.size());
  for (std::size_t i = 0; i < ar.size(); ++i) all[i] = i;
  for (std::size_t i = 1; i < ar.size(); ++i) rloc.push_back(i);
  auto leaf = [&](const DenseState& psi, const std::vector<long>& label, std::span<const int> mm, double p) {
    auto pos = protocol_detail::positions(label, ar);
    CMat rho = psi.reduced(pos);
    auto st = DenseState::from_density(rho);
    double s_r = st.entropy(rloc), s_a = st.entropy(aloc), s_ar = st.entropy(all);
    double v = s_r - s_ar;
    double mi = s_a + s_r - s_ar;
    total += p * v;
    total_mi += p * mi;
    ptot += p;
    acc.add(v);
    acc_mi.add(mi);
    ++count;
    if (records) records->push_back({std::vector<int>(mm.begin(), mm.end()), p, charge_class(L, mm), rho});
  };
  CoherentInfoReport rep;
  rep.params = {{"channel", spec}, {"lattice", L.lattice}};
  double value, mean_mi;
  if (n_traj == 0) {
    walk_dense(dp.psi, dp.label, L.measured, 0, 1.0, m, leaf, nullptr);
    if (std::abs(ptot - 1.0) > 1e-9) throw InvariantViolation("trajectory probabilities do not sum to one");
    value = total;
    mean_mi = total_mi;
    rep.estimator = "exact_dense";
    rep.n_traj = count;
  } else {
    for (std::size_t t = 0; t < n_traj; ++t) {
      Rng rng = Rng(seed).split(t);
      walk_dense(dp.psi, dp.label, L.measured, 0, 1.0, m, leaf, &rng);
    }
    value = acc.mean();
    mean_mi = acc_mi.mean();
    rep.stderr_ = acc.stderr_of_mean();
    rep.estimator = "sampled_dense";
    rep.n_traj = n_traj;
  }
  rep.value = value;
  rep.extra = {{"mean_mutual_information", mean_mi}, {"i_dest", 1.0 - (mean_mi - value)}};
  return rep;
}

// ---------------------------------------------------------------------------
// Closed forms (1D chain, Z dephasing, every measured site of a sublattice decohered).

// 1 - h2((1+t)/2) without cancellation for small t.
inline double charge_capacity(double t) {
  t = std::abs(t);
  if (t > 0.5) return 1.0 - h2((1 + t) / 2);
  double t2 = t * t, term = t2, sum = 0;
  for (int k = 1; k < 200 && term > 0; ++k) {
    sum += term / (2.0 * k * (2.0 * k - 1));
    term *= t2;
    if (term < 1e-18 * sum) break;
  }
  return sum / std::log(2.0);
}

inline double ic_1d_zdephase_closed(std::size_t N, double p_a, double p_b) {
  double lost = 0, kept = 0;
  for (double p : {p_a, p_b}) {
    if (p == 0) continue;
    lost += 1;
    kept += charge_capacity(std::pow(1 - 2 * p, static_cast<double>(N)));
  }
  return (1.0 - lost) + kept;
}

// Large-N form: each decohered sublattice contributes -1 + (1-2p)^{2N}/(2 ln 2).
inline double ic_1d_zdephase_asymptote(std::size_t N, double p_a, double p_b) {
  double lost = 0, kept = 0;
  for (double p : {p_a, p_b})
    if (p > 0) {
      lost += 1;
      kept += std::pow(1 - 2 * p, 2.0 * static_cast<double>(N)) / (2 * std::log(2.0));
    }
  return (1.0 - lost) + kept;
}

inline CoherentInfoReport coherent_info_closed_form(std::size_t N, const ChannelSpec& spec) {
  if (spec.kind != ChannelKind::z_dephase)
    throw std::invalid_argument("closed form available for z_dephase on the 1D chain only");
  spec.validate();
  CoherentInfoReport rep;
  rep.value = ic_1d_zdephase_closed(N, spec.p_a, spec.p_b);
  rep.estimator = "closed_form";
  rep.params = {{"channel", spec}, {"N", N}};
  rep.extra = {{"asymptote", ic_1d_zdephase_asymptote(N, spec.p_a, spec.p_b)}};
  return rep;
}

}  // namespace mixspt
