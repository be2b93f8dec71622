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

#include "mixspt/matching.hpp"
#include "mixspt/rng.hpp"

using namespace mixspt;

namespace {

// Best (cardinality, weight) over all matchings by recursion on the edge list.
std::pair<int, std::int64_t> brute_best(int n, const std::vector<WeightedEdge>& edges, bool maxcard) {
  std::pair<int, std::int64_t> best{0, 0};
  std::vector<char> used(n, 0);
  auto rec = [&](auto&& self, std::size_t k, int card, std::int64_t w) -> void {
    if (k == edges.size()) {
      std::pair<int, std::int64_t> cur{card, w};
      if (maxcard ? cur > best : w > best.second) best = maxcard ? cur : std::pair<int, std::int64_t>{card, w};
      return;
    }
    self(self, k + 1, card, w);
    const auto& e = edges[k];
    if (!used[e.u] && !used[e.v]) {
      used[e.u] = used[e.v] = 1;
      self(self, k + 1, card + 1, w + e.w);
      used[e.u] = used[e.v] = 0;
    }
  };
  rec(rec, 0, 0, 0);
  return best;
}

std::pair<int, std::int64_t> score(const std::vector<int>& mate, const std::vector<WeightedEdge>& edges) {
  int card = 0;
  std::int64_t w = 0;
  std::vector<char> seen(mate.size(), 0);
  for (std::size_t v = 0; v < mate.size(); ++v) {
    if (mate[v] < 0) continue;
    EXPECT_EQ(mate[mate[v]], static_cast<int>(v));
    if (seen[v]) continue;
    seen[v] = seen[mate[v]] = 1;
    ++card;
    std::int64_t best = std::numeric_limits<std::int64_t>::min();
    for (const auto& e : edges)
      if ((e.u == static_cast<int>(v) && e.v == mate[v]) || (e.v == static_cast<int>(v) && e.u == mate[v]))
        best = std::max(best, e.w);
    EXPECT_NE(best, std::numeric_limits<std::int64_t>::min()) << "matched pair without an edge";
    w += best;
  }
  return {card, w};
}

std::int64_t dp_perfect(int n, const std::vector<std::int64_t>& c) {
  std::vector<std::int64_t> f(std::size_t{1} << n, std::numeric_limits<std::int64_t>::max() / 4);
  f[0] = 0;
  for (std::size_t mask = 0; mask < f.size(); ++mask) {
    if (f[mask] >= std::numeric_limits<std::int64_t>::max() / 4) continue;
    int i = 0;
    while (i < n && ((mask >> i) & 1u)) ++i;
    if (i == n) continue;
    for (int j = i + 1; j < n; ++j)
      if (!((mask >> j) & 1u)) {
        auto nm = mask | (std::size_t{1} << i) | (std::size_t{1} << j);
        f[nm] = std::min(f[nm], f[mask] + c[i * n + j]);
      }
  }
  return f.back();
}

}  // namespace

TEST(Blossom, TrivialCases) {
  EXPECT_TRUE(max_weight_matching(0, {}).empty());
  std::vector<WeightedEdge> one{{0, 1, 1}};
  EXPECT_EQ(max_weight_matching(2, one), (std::vector<int>{1, 0}));
  std::vector<WeightedEdge> path{{1, 2, 10}, {2, 3, 11}};
  EXPECT_EQ(max_weight_matching(4, path), (std::vector<int>{-1, -1, 3, 2}));
  std::vector<WeightedEdge> path2{{1, 2, 5}, {2, 3, 11}, {3, 4, 5}};
  EXPECT_EQ(max_weight_matching(5, path2), (std::vector<int>{-1, -1, 3, 2, -1}));
  EXPECT_EQ(max_weight_matching(5, path2, true), (std::vector<int>{-1, 2, 1, 4, 3}));
}

TEST(Blossom, NestedBlossomInstances) {
  // Classic instances exercising blossom creation, relabeling and expansion.
  std::vector<WeightedEdge> s_blossom{{1, 2, 8}, {1, 3, 9}, {2, 3, 10}, {3, 4, 7}};
  EXPECT_EQ(max_weight_matching(5, s_blossom), (std::vector<int>{-1, 2, 1, 4, 3}));
  std::vector<WeightedEdge> t_expand{{1, 2, 23}, {1, 5, 22}, {1, 6, 15}, {2, 3, 25}, {3, 4, 22}, {4, 5, 25}, {4, 8, 14}, {5, 7, 13}};
  EXPECT_EQ(max_weight_matching(9, t_expand), (std::vector<int>{-1, 6, 3, 2, 8, 7, 1, 5, 4}));
  std::vector<WeightedEdge> nested{{1, 2, 19}, {1, 3, 20}, {1, 8, 8}, {2, 3, 25}, {2, 4, 18}, {3, 5, 18}, {4, 5, 13}, {4, 7, 7}, {5, 6, 7}};
  EXPECT_EQ(max_weight_matching(9, nested), (std::vector<int>{-1, 8, 3, 2, 7, 6, 5, 4, 1}));
  std::vector<WeightedEdge> relabel{{1, 2, 45}, {1, 5, 45}, {2, 3, 50}, {3, 4, 45}, {4, 5, 50}, {1, 6, 30}, {3, 9, 35}, {4, 8, 35}, {5, 7, 26}, {9, 10, 5}};
  EXPECT_EQ(max_weight_matching(11, relabel), (std::vector<int>{-1, 6, 3, 2, 8, 7, 1, 5, 4, 10, 9}));
  std::vector<WeightedEdge> nasty{{1, 2, 45}, {1, 5, 45}, {2, 3, 50}, {3, 4, 45}, {4, 5, 50}, {1, 6, 30}, {3, 9, 35}, {4, 8, 26}, {5, 7, 40}, {9, 10, 5}};
  EXPECT_EQ(max_weight_matching(11, nasty), (std::vector<int>{-1, 6, 3, 2, 8, 7, 1, 5, 4, 10, 9}));
  std::vector<WeightedEdge> expand_nested{{1, 2, 40}, {1, 3, 40}, {2, 3, 60}, {2, 4, 55}, {3, 5, 55}, {4, 5, 50}, {1, 8, 15}, {5, 7, 30}, {7, 6, 10}, {8, 10, 10}, {4, 9, 30}};
  EXPECT_EQ(max_weight_matching(11, expand_nested), (std::vector<int>{-1, 2, 1, 5, 9, 3, 7, 6, 10, 4, 8}));
}

TEST(Blossom, MatchesBruteForceOnRandomGraphs) {
  Rng rng(2026);
  for (int trial = 0; trial < 300; ++trial) {
    int n = 2 + static_cast<int>(rng.below(7));
    std::vector<WeightedEdge> edges;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (rng.uniform() < 0.6) edges.push_back({i, j, static_cast<std::int64_t>(rng.below(30))});
    if (edges.size() > 14) edges.resize(14);
    for (bool maxcard : {false, true}) {
      auto mate = max_weight_matching(n, edges, maxcard);
      auto got = score(mate, edges);
      auto want = brute_best(n, edges, maxcard);
      if (maxcard) EXPECT_EQ(got, want) << "trial " << trial;
      else EXPECT_EQ(got.second, want.second) << "trial " << trial;
    }
  }
}

TEST(Blossom, PerfectMatchingMatchesBitmaskOptimum) {
  Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 2 * (1 + static_cast<int>(rng.below(6)));
    std::vector<std::int64_t> c(n * n, 0);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) c[i * n + j] = c[j * n + i] = static_cast<std::int64_t>(rng.below(1000));
    auto mate = min_weight_perfect_matching(n, c);
    std::int64_t tot = 0;
    for (int v = 0; v < n; ++v) {
      ASSERT_GE(mate[v], 0);
      ASSERT_EQ(mate[mate[v]], v);
      if (v < mate[v]) tot += c[v * n + mate[v]];
    }
    EXPECT_EQ(tot, dp_perfect(n, c)) << "trial " << trial;
  }
}

TEST(Blossom, RejectsBadInput) {
  std::vector<WeightedEdge> loop{{0, 0, 1}};
  EXPECT_THROW(max_weight_matching(1, loop), std::invalid_argument);
  std::vector<std::int64_t> c(9, 1);
  EXPECT_THROW(min_weight_perfect_matching(3, c), std::invalid_argument);
}
