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
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace mixspt {

struct WeightedEdge {
  int u = 0, v = 0;
  std::int64_t w = 0;
};

// Maximum-weight (optionally maximum-cardinality) matching on a general graph.
// Edmonds' blossom algorithm with primal-dual updates, O(n^3), integer weights.
// Returns mate[v] (or -1).
class BlossomMatcher {
 public:
  BlossomMatcher(int n_vertices, std::span<const WeightedEdge> edges, bool max_cardinality)
      : n_(n_vertices), edges_(edges.begin(), edges.end()), maxcard_(max_cardinality) {
    for (const auto& e : edges_) {
      if (e.u < 0 || e.v < 0 || e.u >= n_ || e.v >= n_ || e.u == e.v)
        throw std::invalid_argument("matching edge with invalid endpoints");
    }
  }

  std::vector<int> solve() {
    const int n = n_;
    const int m = static_cast<int>(edges_.size());
    if (n == 0) return {};
    std::int64_t maxw = 0;
    for (const auto& e : edges_) maxw = std::max(maxw, 2 * e.w);
    endpoint_.resize(2 * m);
    for (int p = 0; p < 2 * m; ++p) endpoint_[p] = p % 2 ? edges_[p / 2].v : edges_[p / 2].u;
    neighbend_.assign(n, {});
    for (int k = 0; k < m; ++k) {
      neighbend_[edges_[k].u].push_back(2 * k + 1);
      neighbend_[edges_[k].v].push_back(2 * k);
    }
    mate_.assign(n, -1);
    label_.assign(2 * n, 0);
    labelend_.assign(2 * n, -1);
    inblossom_.resize(n);
    for (int i = 0; i < n; ++i) inblossom_[i] = i;
    blossomparent_.assign(2 * n, -1);
    blossomchilds_.assign(2 * n, {});
    blossombase_.assign(2 * n, -1);
    for (int i = 0; i < n; ++i) blossombase_[i] = i;
    blossomendps_.assign(2 * n, {});
    bestedge_.assign(2 * n, -1);
    blossombestedges_.assign(2 * n, {});
    has_bestedges_.assign(2 * n, false);
    unused_.clear();
    for (int b = n; b < 2 * n; ++b) unused_.push_back(b);
    dual_.assign(2 * n, 0);
    for (int i = 0; i < n; ++i) dual_[i] = maxw;
    allowedge_.assign(m, false);

    for (int stage = 0; stage < n; ++stage) {
      std::fill(label_.begin(), label_.end(), 0);
      std::fill(bestedge_.begin(), bestedge_.end(), -1);
      for (int b = n; b < 2 * n; ++b) {
        blossombestedges_[b].clear();
        has_bestedges_[b] = false;
      }
      std::fill(allowedge_.begin(), allowedge_.end(), false);
      queue_.clear();
      for (int v = 0; v < n; ++v)
        if (mate_[v] == -1 && label_[inblossom_[v]] == 0) assign_label(v, 1, -1);

      bool augmented = false;
      while (true) {
        while (!queue_.empty() && !augmented) {
          int v = queue_.back();
          queue_.pop_back();
          for (int p : neighbend_[v]) {
            int k = p / 2;
            int w = endpoint_[p];
            if (inblossom_[v] == inblossom_[w]) continue;
            std::int64_t kslack = 0;
            if (!allowedge_[k]) {
              kslack = slack(k);
              if (kslack <= 0) allowedge_[k] = true;
            }
            if (allowedge_[k]) {
              if (label_[inblossom_[w]] == 0) {
                assign_label(w, 2, p ^ 1);
              } else if (label_[inblossom_[w]] == 1) {
                int base = scan_blossom(v, w);
                if (base >= 0) {
                  add_blossom(base, k);
                } else {
                  augment_matching(k);
                  augmented = true;
                  break;
                }
              } else if (label_[w] == 0) {
                label_[w] = 2;
                labelend_[w] = p ^ 1;
              }
            } else if (label_[inblossom_[w]] == 1) {
              int b = inblossom_[v];
              if (bestedge_[b] == -1 || kslack < slack(bestedge_[b])) bestedge_[b] = k;
            } else if (label_[w] == 0) {
              if (bestedge_[w] == -1 || kslack < slack(bestedge_[w])) bestedge_[w] = k;
            }
          }
        }
        if (augmented) break;

        int deltatype = -1, deltaedge = -1, deltablossom = -1;
        std::int64_t delta = 0;
        if (!maxcard_) {
          deltatype = 1;
          delta = *std::min_element(dual_.begin(), dual_.begin() + n);
        }
        for (int v = 0; v < n; ++v) {
          if (label_[inblossom_[v]] == 0 && bestedge_[v] != -1) {
            std::int64_t d = slack(bestedge_[v]);
            if (deltatype == -1 || d < delta) {
              delta = d;
              deltatype = 2;
              deltaedge = bestedge_[v];
            }
          }
        }
        for (int b = 0; b < 2 * n; ++b) {
          if (blossomparent_[b] == -1 && label_[b] == 1 && bestedge_[b] != -1) {
            std::int64_t ks = slack(bestedge_[b]);
            if (ks % 2 != 0) throw std::logic_error("odd slack between S-blossoms");
            std::int64_t d = ks / 2;
            if (deltatype == -1 || d < delta) {
              delta = d;
              deltatype = 3;
              deltaedge = bestedge_[b];
            }
          }
        }
        for (int b = n; b < 2 * n; ++b) {
          if (blossombase_[b] >= 0 && blossomparent_[b] == -1 && label_[b] == 2 &&
              (deltatype == -1 || dual_[b] < delta)) {
            delta = dual_[b];
            deltatype = 4;
            deltablossom = b;
          }
        }
        if (deltatype == -1) {
          deltatype = 1;
          delta = std::max<std::int64_t>(0, *std::min_element(dual_.begin(), dual_.begin() + n));
        }
        for (int v = 0; v < n; ++v) {
          if (label_[inblossom_[v]] == 1) dual_[v] -= delta;
          else if (label_[inblossom_[v]] == 2) dual_[v] += delta;
        }
        for (int b = n; b < 2 * n; ++b) {
          if (blossombase_[b] >= 0 && blossomparent_[b] == -1) {
            if (label_[b] == 1) dual_[b] += delta;
            else if (label_[b] == 2) dual_[b] -= delta;
          }
        }
        if (deltatype == 1) break;
        if (deltatype == 2) {
          allowedge_[deltaedge] = true;
          int i = edges_[deltaedge].u, j = edges_[deltaedge].v;
          if (label_[inblossom_[i]] == 0) std::swap(i, j);
          queue_.push_back(i);
        } else if (deltatype == 3) {
          allowedge_[deltaedge] = true;
          queue_.push_back(edges_[deltaedge].u);
        } else {
          expand_blossom(deltablossom, false);
        }
      }
      if (!augmented) break;
      for (int b = n; b < 2 * n; ++b)
        if (blossomparent_[b] == -1 && blossombase_[b] >= 0 && label_[b] == 1 && dual_[b] == 0)
          expand_blossom(b, true);
    }
    std::vector<int> out(n, -1);
    for (int v = 0; v < n; ++v)
      if (mate_[v] >= 0) out[v] = endpoint_[mate_[v]];
    return out;
  }

 private:
  std::int64_t slack(int k) const {
    const auto& e = edges_[k];
    return dual_[e.u] + dual_[e.v] - 4 * e.w;
  }

  void leaves(int b, std::vector<int>& out) const {
    if (b < n_) {
      out.push_back(b);
      return;
    }
    for (int t : blossomchilds_[b]) leaves(t, out);
  }
  std::vector<int> leaves(int b) const {
    std::vector<int> out;
    leaves(b, out);
    return out;
  }

  void assign_label(int w, int t, int p) {
    int b = inblossom_[w];
    label_[w] = label_[b] = t;
    labelend_[w] = labelend_[b] = p;
    bestedge_[w] = bestedge_[b] = -1;
    if (t == 1) {
      leaves(b, queue_);
    } else if (t == 2) {
      int base = blossombase_[b];
      assign_label(endpoint_[mate_[base]], 1, mate_[base] ^ 1);
    }
  }

  int scan_blossom(int v, int w) {
    std::vector<int> path;
    int base = -1;
    while (v != -1 || w != -1) {
      int b = inblossom_[v];
      if (label_[b] & 4) {
        base = blossombase_[b];
        break;
      }
      path.push_back(b);
      label_[b] = 5;
      if (labelend_[b] == -1) {
        v = -1;
      } else {
        v = endpoint_[labelend_[b]];
        b = inblossom_[v];
        v = endpoint_[labelend_[b]];
      }
      if (w != -1) std::swap(v, w);
    }
    for (int b : path) label_[b] = 1;
    return base;
  }

  void add_blossom(int base, int k) {
    int v = edges_[k].u, w = edges_[k].v;
    int bb = inblossom_[base], bv = inblossom_[v], bw = inblossom_[w];
    int b = unused_.back();
    unused_.pop_back();
    blossombase_[b] = base;
    blossomparent_[b] = -1;
    blossomparent_[bb] = b;
    auto& path = blossomchilds_[b];
    auto& endps = blossomendps_[b];
    path.clear();
    endps.clear();
    while (bv != bb) {
      blossomparent_[bv] = b;
      path.push_back(bv);
      endps.push_back(labelend_[bv]);
      v = endpoint_[labelend_[bv]];
      bv = inblossom_[v];
    }
    path.push_back(bb);
    std::reverse(path.begin(), path.end());
    std::reverse(endps.begin(), endps.end());
    endps.push_back(2 * k);
    while (bw != bb) {
      blossomparent_[bw] = b;
      path.push_back(bw);
      endps.push_back(labelend_[bw] ^ 1);
      w = endpoint_[labelend_[bw]];
      bw = inblossom_[w];
    }
    label_[b] = 1;
    labelend_[b] = labelend_[bb];
    dual_[b] = 0;
    for (int lv : leaves(b)) {
      if (label_[inblossom_[lv]] == 2) queue_.push_back(lv);
      inblossom_[lv] = b;
    }
    std::vector<int> bestedgeto(2 * n_, -1);
    for (int sub : path) {
      std::vector<int> candidates;
      if (!has_bestedges_[sub]) {
        for (int lv : leaves(sub))
          for (int p : neighbend_[lv]) candidates.push_back(p / 2);
      } else {
        candidates = blossombestedges_[sub];
      }
      for (int kk : candidates) {
        int i = edges_[kk].u, j = edges_[kk].v;
        if (inblossom_[j] == b) std::swap(i, j);
        int bj = inblossom_[j];
        if (bj != b && label_[bj] == 1 && (bestedgeto[bj] == -1 || slack(kk) < slack(bestedgeto[bj])))
          bestedgeto[bj] = kk;
      }
      blossombestedges_[sub].clear();
      has_bestedges_[sub] = false;
      bestedge_[sub] = -1;
    }
    blossombestedges_[b].clear();
    for (int kk : bestedgeto)
      if (kk != -1) blossombestedges_[b].push_back(kk);
    has_bestedges_[b] = true;
    bestedge_[b] = -1;
    for (int kk : blossombestedges_[b])
      if (bestedge_[b] == -1 || slack(kk) < slack(bestedge_[b])) bestedge_[b] = kk;
  }

  void expand_blossom(int b, bool endstage) {
    for (int s : blossomchilds_[b]) {
      blossomparent_[s] = -1;
      if (s < n_) {
        inblossom_[s] = s;
      } else if (endstage && dual_[s] == 0) {
        expand_blossom(s, endstage);
      } else {
        for (int lv : leaves(s)) inblossom_[lv] = s;
      }
    }
    if (!endstage && label_[b] == 2) {
      const auto& childs = blossomchilds_[b];
      const auto& endps = blossomendps_[b];
      const int len = static_cast<int>(childs.size());
      auto at = [len](int j) { return ((j % len) + len) % len; };
      int entrychild = inblossom_[endpoint_[labelend_[b] ^ 1]];
      int j = static_cast<int>(std::find(childs.begin(), childs.end(), entrychild) - childs.begin());
      int jstep, endptrick;
      if (j & 1) {
        j -= len;
        jstep = 1;
        endptrick = 0;
      } else {
        jstep = -1;
        endptrick = 1;
      }
      int p = labelend_[b];
      while (j != 0) {
        label_[endpoint_[p ^ 1]] = 0;
        label_[endpoint_[endps[at(j - endptrick)] ^ endptrick ^ 1]] = 0;
        assign_label(endpoint_[p ^ 1], 2, p);
        allowedge_[endps[at(j - endptrick)] / 2] = true;
        j += jstep;
        p = endps[at(j - endptrick)] ^ endptrick;
        allowedge_[p / 2] = true;
        j += jstep;
      }
      int bv = childs[at(j)];
      label_[endpoint_[p ^ 1]] = label_[bv] = 2;
      labelend_[endpoint_[p ^ 1]] = labelend_[bv] = p;
      bestedge_[bv] = -1;
      j += jstep;
      while (childs[at(j)] != entrychild) {
        bv = childs[at(j)];
        if (label_[bv] == 1) {
          j += jstep;
          continue;
        }
        int found = -1;
        for (int lv : leaves(bv))
          if (label_[lv] != 0) {
            found = lv;
            break;
          }
        if (found >= 0) {
          label_[found] = 0;
          label_[endpoint_[mate_[blossombase_[bv]]]] = 0;
          assign_label(found, 2, labelend_[found]);
        }
        j += jstep;
      }
    }
    label_[b] = labelend_[b] = -1;
    blossomchilds_[b].clear();
    blossomendps_[b].clear();
    blossombase_[b] = -1;
    blossombestedges_[b].clear();
    has_bestedges_[b] = false;
    bestedge_[b] = -1;
    unused_.push_back(b);
  }

  void augment_blossom(int b, int v) {
    int t = v;
    while (blossomparent_[t] != b) t = blossomparent_[t];
    if (t >= n_) augment_blossom(t, v);
    auto& childs = blossomchilds_[b];
    auto& endps = blossomendps_[b];
    const int len = static_cast<int>(childs.size());
    auto at = [len](int j) { return ((j % len) + len) % len; };
    int i = static_cast<int>(std::find(childs.begin(), childs.end(), t) - childs.begin());
    int j = i, jstep, endptrick;
    if (i & 1) {
      j -= len;
      jstep = 1;
      endptrick = 0;
    } else {
      jstep = -1;
      endptrick = 1;
    }
    while (j != 0) {
      j += jstep;
      t = childs[at(j)];
      int p = endps[at(j - endptrick)] ^ endptrick;
      if (t >= n_) augment_blossom(t, endpoint_[p]);
      j += jstep;
      t = childs[at(j)];
      if (t >= n_) augment_blossom(t, endpoint_[p ^ 1]);
      mate_[endpoint_[p]] = p ^ 1;
      mate_[endpoint_[p ^ 1]] = p;
    }
    std::rotate(childs.begin(), childs.begin() + i, childs.end());
    std::rotate(endps.begin(), endps.begin() + i, endps.end());
    blossombase_[b] = blossombase_[childs[0]];
  }

  void augment_matching(int k) {
    const int v = edges_[k].u, w = edges_[k].v;
    for (auto [s, p] : {std::pair{v, 2 * k + 1}, std::pair{w, 2 * k}}) {
      while (true) {
        int bs = inblossom_[s];
        if (bs >= n_) augment_blossom(bs, s);
        mate_[s] = p;
        if (labelend_[bs] == -1) break;
        int t = endpoint_[labelend_[bs]];
        int bt = inblossom_[t];
        s = endpoint_[labelend_[bt]];
        int j = endpoint_[labelend_[bt] ^ 1];
        if (bt >= n_) augment_blossom(bt, j);
        mate_[j] = labelend_[bt];
        p = labelend_[bt] ^ 1;
      }
    }
  }

  int n_;
  std::vector<WeightedEdge> edges_;
  bool maxcard_;
  std::vector<int> endpoint_;
  std::vector<std::vector<int>> neighbend_;
  std::vector<int> mate_, label_, labelend_, inblossom_, blossomparent_, blossombase_, bestedge_, unused_, queue_;
  std::vector<std::vector<int>> blossomchilds_, blossomendps_, blossombestedges_;
  std::vector<bool> has_bestedges_, allowedge_;
  std::vector<std::int64_t> dual_;
};

inline std::vector<int> max_weight_matching(int n_vertices, std::span<const WeightedEdge> edges,
                                            bool max_cardinality = false) {
  return BlossomMatcher(n_vertices, edges, max_cardinality).solve();
}

// Minimum-cost perfect matching on a complete graph given a symmetric integer cost matrix
// (row-major n x n, n even). Returns mate[v].
inline std::vector<int> min_weight_perfect_matching(int n, std::span<const std::int64_t> cost) {
  if (n % 2) throw std::invalid_argument("perfect matching needs an even number of vertices");
  if (cost.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
    throw std::invalid_argument("cost matrix has wrong size");
  std::int64_t top = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (cost[i * n + j] < 0) throw std::invalid_argument("negative matching cost");
      top = std::max(top, cost[i * n + j]);
    }
  std::vector<WeightedEdge> edges;
  edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.push_back({i, j, top + 1 - cost[i * n + j]});
  auto mate = max_weight_matching(n, edges, true);
  for (int v = 0; v < n; ++v)
    if (mate[v] < 0) throw std::logic_error("matching is not perfect");
  return mate;
}

}  // namespace mixspt
