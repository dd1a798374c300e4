#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <vector>

#include "mtqc/matching.hpp"
#include "mtqc/rng.hpp"

using namespace mtqc;

namespace {

// Exhaustive maximum-weight matching over vertex subsets; exponential but
// exact, usable up to ~14 vertices.
std::int64_t brute_force(int n, const std::vector<std::vector<std::int64_t>>& w) {
  std::vector<std::int64_t> best(std::size_t(1) << n, 0);
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    int u = 0;
    while (!(mask & (1u << u))) ++u;
    std::int64_t v = best[mask & (mask - 1)];  // leave u unmatched
    for (int j = u + 1; j < n; ++j)
      if ((mask & (1u << j)) && w[u][j] > 0)
        v = std::max(v, w[u][j] + best[mask & ~(1u << u) & ~(1u << j)]);
    best[mask] = v;
  }
  return best[(std::size_t(1) << n) - 1];
}

void check_solution(int n, const std::vector<std::vector<std::int64_t>>& w,
                    const MatchingSolution& sol) {
  std::int64_t seen = 0;
  for (int u = 0; u < n; ++u) {
    if (sol.mate[u] < 0) continue;
    int v = sol.mate[u];
    REQUIRE(v >= 0);
    REQUIRE(v < n);
    CHECK(sol.mate[v] == u);
    CHECK(w[u][v] > 0);
    if (u < v) seen += w[u][v];
  }
  CHECK(seen == sol.total_weight);
}

}  // namespace

TEST_CASE("matching on tiny fixed graphs", "[matching]") {
  {
    MaxWeightMatching m(2);
    CHECK(m.solve().total_weight == 0);  // no edges
  }
  {
    MaxWeightMatching m(2);
    m.add_edge(0, 1, 7);
    MatchingSolution s = m.solve();
    CHECK(s.total_weight == 7);
    CHECK(s.mate[0] == 1);
    CHECK(s.mate[1] == 0);
  }
  {
    // path 0-1-2: only one of the two edges fits
    MaxWeightMatching m(3);
    m.add_edge(0, 1, 5);
    m.add_edge(1, 2, 4);
    MatchingSolution s = m.solve();
    CHECK(s.total_weight == 5);
    CHECK(s.mate[2] == -1);
  }
  {
    // triangle: best single edge wins
    MaxWeightMatching m(3);
    m.add_edge(0, 1, 3);
    m.add_edge(1, 2, 3);
    m.add_edge(0, 2, 5);
    CHECK(m.solve().total_weight == 5);
  }
  {
    // square where the cheap pairing is jointly better
    MaxWeightMatching m(4);
    m.add_edge(0, 1, 10);
    m.add_edge(1, 2, 6);
    m.add_edge(2, 3, 10);
    m.add_edge(0, 3, 6);
    CHECK(m.solve().total_weight == 20);
  }
  {
    // five-cycle with a pendant: forces odd-set (blossom) reasoning
    MaxWeightMatching m(6);
    m.add_edge(0, 1, 8);
    m.add_edge(1, 2, 9);
    m.add_edge(2, 3, 8);
    m.add_edge(3, 4, 9);
    m.add_edge(4, 0, 8);
    m.add_edge(2, 5, 2);
    MatchingSolution s = m.solve();
    std::vector<std::vector<std::int64_t>> w(6, std::vector<std::int64_t>(6, 0));
    w[0][1] = w[1][0] = 8;
    w[1][2] = w[2][1] = 9;
    w[2][3] = w[3][2] = 8;
    w[3][4] = w[4][3] = 9;
    w[4][0] = w[0][4] = 8;
    w[2][5] = w[5][2] = 2;
    CHECK(s.total_weight == brute_force(6, w));
    check_solution(6, w, s);
  }
}

TEST_CASE("duplicate and degenerate edges", "[matching]") {
  MaxWeightMatching m(3);
  m.add_edge(0, 1, 4);
  m.add_edge(0, 1, 9);   // keeps the max
  m.add_edge(0, 1, 2);
  m.add_edge(1, 1, 50);  // self loop ignored
  m.add_edge(1, 2, 0);   // non-positive ignored
  m.add_edge(1, 2, -3);
  CHECK(m.solve().total_weight == 9);
}

TEST_CASE("matching agrees with brute force on random graphs", "[matching]") {
  SplitMix64 rng(20247);
  int cases = 0;
  for (int n = 2; n <= 11; ++n) {
    for (int rep = 0; rep < 30; ++rep) {
      std::vector<std::vector<std::int64_t>> w(n, std::vector<std::int64_t>(n, 0));
      MaxWeightMatching m(n);
      for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) {
          if (rng.uniform() < 0.5) continue;
          auto weight = static_cast<std::int64_t>(rng.next() % 20 + 1);
          w[u][v] = w[v][u] = weight;
          m.add_edge(u, v, weight);
        }
      MatchingSolution sol = m.solve();
      CHECK(sol.total_weight == brute_force(n, w));
      check_solution(n, w, sol);
      ++cases;
    }
  }
  CHECK(cases == 300);
}

TEST_CASE("matching handles dense large-weight instances", "[matching]") {
  SplitMix64 rng(99);
  for (int rep = 0; rep < 5; ++rep) {
    const int n = 14;
    std::vector<std::vector<std::int64_t>> w(n, std::vector<std::int64_t>(n, 0));
    MaxWeightMatching m(n);
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v) {
        auto weight = static_cast<std::int64_t>(rng.next() % 1000000 + 1);
        w[u][v] = w[v][u] = weight;
        m.add_edge(u, v, weight);
      }
    MatchingSolution sol = m.solve();
    CHECK(sol.total_weight == brute_force(n, w));
    check_solution(n, w, sol);
  }
}
