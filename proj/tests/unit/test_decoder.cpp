#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <vector>

#include "mtqc/decoder.hpp"
#include "mtqc/lattice.hpp"
#include "mtqc/rng.hpp"

using namespace mtqc;

namespace {

std::vector<char> mask_of(const RhgLattice& lat, const std::vector<int>& qubits) {
  std::vector<char> m(lat.num_qubits(), 0);
  for (int q : qubits) {
    REQUIRE(q >= 0);
    m[q] = 1;
  }
  return m;
}

// Independent loss oracle: breadth-first search from the x = 0 boundary over
// cells connected by removed faces; loss iff the far boundary is reached.
bool loss_oracle(const RhgLattice& lat, const std::vector<char>& removed) {
  std::vector<char> seen(lat.num_cells(), 0);
  std::vector<int> queue;
  bool reached = false;
  auto push = [&](int c) {
    if (c >= 0 && !seen[c]) {
      seen[c] = 1;
      queue.push_back(c);
    }
  };
  for (int q = 0; q < lat.num_qubits(); ++q)
    if (removed[q] && lat.qubits()[q].x_low) push(lat.qubits()[q].cell[1]);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Cell& c = lat.cells()[queue[head]];
    for (int f = 0; f < 6; ++f) {
      int q = c.face[f];
      if (q < 0 || !removed[q]) continue;
      const Qubit& qu = lat.qubits()[q];
      if (qu.x_high) reached = true;
      push(qu.cell[0] == queue[head] ? qu.cell[1] : qu.cell[0]);
    }
  }
  return reached;
}

// Boundary-or-pair assignment cost by exhaustive subset recursion.
std::int64_t matching_oracle(const SyndromeData& s) {
  const int n = static_cast<int>(s.events.size());
  REQUIRE(n <= 12);
  std::vector<std::int64_t> memo(std::size_t(1) << n, -1);
  auto rec = [&](auto&& self, std::uint32_t mask) -> std::int64_t {
    if (!mask) return 0;
    std::int64_t& out = memo[mask];
    if (out >= 0) return out;
    int i = 0;
    while (!(mask & (1u << i))) ++i;
    std::int64_t best = std::min(s.b0_dist[i], s.b1_dist[i]) + self(self, mask & ~(1u << i));
    for (int j = i + 1; j < n; ++j) {
      if (!(mask & (1u << j)) || s.pair_dist[i][j] >= SyndromeData::kInfDist) continue;
      best = std::min(best,
                      s.pair_dist[i][j] + self(self, mask & ~(1u << i) & ~(1u << j)));
    }
    return out = best;
  };
  return rec(rec, (std::uint32_t(1) << n) - 1);
}

// Plain BFS over the class graph rebuilt from the edge list.
std::vector<int> bfs_oracle(const SyndromeData& s, int source) {
  std::vector<std::vector<int>> adj(s.num_classes);
  for (const auto& e : s.edges) {
    adj[e[0]].push_back(e[1]);
    adj[e[1]].push_back(e[0]);
  }
  std::vector<int> dist(s.num_classes, SyndromeData::kInfDist);
  std::vector<int> queue{source};
  dist[source] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head)
    for (int v : adj[queue[head]])
      if (dist[v] > dist[queue[head]] + 1) {
        dist[v] = dist[queue[head]] + 1;
        queue.push_back(v);
      }
  return dist;
}

}  // namespace

TEST_CASE("removal sampling respects masks and extremes", "[decoder]") {
  RhgLattice lat({3, 2});
  SplitMix64 rng(1);
  std::vector<char> none = apply_removals(lat, {0.0, 0.0}, rng);
  CHECK(std::count(none.begin(), none.end(), 1) == 0);
  std::vector<char> all = apply_removals(lat, {1.0}, rng);
  for (int q = 0; q < lat.num_qubits(); ++q)
    CHECK(static_cast<bool>(all[q]) == !lat.qubits()[q].time_boundary);
}

TEST_CASE("supercheck merging on the smallest volume", "[decoder]") {
  RhgLattice lat({3, 2});
  int mid = lat.qubit_at(2, 1, 1);
  int c_left = lat.cell_index(0, 0, 0), c_right = lat.cell_index(1, 0, 0);

  SECTION("no removals keeps all checks distinct") {
    SupercheckPartition p = merge_superchecks(lat, mask_of(lat, {}));
    CHECK_FALSE(p.logical_loss);
    std::map<int, int> roots;
    for (int c = 0; c < lat.num_cells(); ++c) ++roots[p.cls[c]];
    CHECK(static_cast<int>(roots.size()) == lat.num_cells());
  }
  SECTION("a removed bulk face merges its two cells") {
    SupercheckPartition p = merge_superchecks(lat, mask_of(lat, {mid}));
    CHECK_FALSE(p.logical_loss);
    CHECK(p.cls[c_left] == p.cls[c_right]);
    CHECK(p.cls[c_left] != p.b0);
    // merged support: the remaining four faces of each five-face check
    std::vector<int> sup = supercheck_support(lat, p, p.cls[c_left]);
    CHECK(sup.size() == 8);
    CHECK(std::find(sup.begin(), sup.end(), mid) == sup.end());
  }
  SECTION("a removed chain spanning x is a logical loss") {
    SupercheckPartition p = merge_superchecks(
        lat, mask_of(lat, {lat.qubit_at(0, 1, 1), mid, lat.qubit_at(4, 1, 1)}));
    CHECK(p.logical_loss);
    CHECK_THROWS_AS(extract_syndrome(lat, p, std::vector<char>(lat.num_qubits(), 0)),
                    std::invalid_argument);
  }
}

TEST_CASE("supercheck merging matches a flood-fill oracle", "[decoder]") {
  for (auto [d, T, rate] : std::vector<std::tuple<int, int, double>>{
           {3, 2, 0.25}, {3, 2, 0.4}, {5, 3, 0.3}}) {
    RhgLattice lat({d, T});
    SplitMix64 rng(1000 + d + static_cast<int>(rate * 100));
    for (int rep = 0; rep < 120; ++rep) {
      std::vector<char> removed = apply_removals(lat, {rate}, rng);
      SupercheckPartition p = merge_superchecks(lat, removed);
      CHECK(p.logical_loss == loss_oracle(lat, removed));
      // removed bulk faces always connect their two cells
      for (int q = 0; q < lat.num_qubits(); ++q) {
        if (!removed[q]) continue;
        const Qubit& qu = lat.qubits()[q];
        if (qu.cell[0] >= 0 && qu.cell[1] >= 0)
          CHECK(p.cls[qu.cell[0]] == p.cls[qu.cell[1]]);
      }
    }
  }
}

TEST_CASE("dephasing assignment extremes", "[decoder]") {
  RhgLattice lat({3, 2});
  SplitMix64 rng(7);
  std::vector<char> removed = mask_of(lat, {lat.qubit_at(2, 1, 1)});
  std::vector<char> none = assign_dephasing(lat, removed, 0.0, rng);
  CHECK(std::count(none.begin(), none.end(), 1) == 0);
  std::vector<char> all = assign_dephasing(lat, removed, 1.0, rng);
  for (int q = 0; q < lat.num_qubits(); ++q) {
    bool expect = !removed[q] && !lat.qubits()[q].time_boundary;
    CHECK(static_cast<bool>(all[q]) == expect);
  }
  CHECK_THROWS_AS(assign_dephasing(lat, removed, 1.5, rng), std::domain_error);
}

TEST_CASE("syndrome structure on hand-built errors", "[decoder]") {
  RhgLattice lat({3, 2});
  SupercheckPartition clean = merge_superchecks(lat, mask_of(lat, {}));
  int c_left = lat.cell_index(0, 0, 0), c_right = lat.cell_index(1, 0, 0);

  SECTION("single bulk flip raises its two checks") {
    SyndromeData s =
        extract_syndrome(lat, clean, mask_of(lat, {lat.qubit_at(2, 1, 1)}));
    REQUIRE(s.events.size() == 2);
    CHECK(s.events[0] == s.cell_class[c_left]);
    CHECK(s.events[1] == s.cell_class[c_right]);
    CHECK(s.pair_dist[0][1] == 1);
    CHECK(s.b0_dist[0] == 1);
    CHECK(s.b1_dist[0] == 2);
    CHECK(s.b0_dist[1] == 2);
    CHECK(s.b1_dist[1] == 1);
    MatchingResult m = mwpm_decode(s);
    CHECK(m.total_weight == 1);
    CHECK(m.mate[0] == 1);
    CHECK(classify_logical_error(lat, s, m, mask_of(lat, {lat.qubit_at(2, 1, 1)})).empty());
  }
  SECTION("boundary flip raises one check and matches out") {
    std::vector<char> err = mask_of(lat, {lat.qubit_at(0, 1, 1)});
    SyndromeData s = extract_syndrome(lat, clean, err);
    REQUIRE(s.events.size() == 1);
    CHECK(s.events[0] == s.cell_class[c_left]);
    CHECK(s.b0_dist[0] == 1);
    CHECK(s.b1_dist[0] == 2);
    MatchingResult m = mwpm_decode(s);
    CHECK(m.total_weight == 1);
    CHECK(m.mate[0] == -1);
    CHECK(m.boundary_side[0] == 0);
    CHECK(classify_logical_error(lat, s, m, err).empty());
  }
  SECTION("weight-2 chain defeats distance 3") {
    std::vector<char> err =
        mask_of(lat, {lat.qubit_at(0, 1, 1), lat.qubit_at(2, 1, 1)});
    SyndromeData s = extract_syndrome(lat, clean, err);
    REQUIRE(s.events.size() == 1);
    CHECK(s.events[0] == s.cell_class[c_right]);
    MatchingResult m = mwpm_decode(s);
    CHECK(m.total_weight == 1);
    CHECK(m.boundary_side[0] == 1);  // nearest boundary is the far side
    std::vector<int> times = classify_logical_error(lat, s, m, err);
    CHECK(times == std::vector<int>{0});
  }
  SECTION("undetectable spanning chain is flagged at its time step") {
    std::vector<char> err = mask_of(
        lat, {lat.qubit_at(0, 1, 1), lat.qubit_at(2, 1, 1), lat.qubit_at(4, 1, 1)});
    SyndromeData s = extract_syndrome(lat, clean, err);
    CHECK(s.events.empty());
    MatchingResult m = mwpm_decode(s);
    CHECK(m.total_weight == 0);
    CHECK(classify_logical_error(lat, s, m, err) == std::vector<int>{0});
  }
  SECTION("later time slab reports its own index") {
    std::vector<char> err =
        mask_of(lat, {lat.qubit_at(0, 1, 3), lat.qubit_at(2, 1, 3)});
    SyndromeData s = extract_syndrome(lat, clean, err);
    MatchingResult m = mwpm_decode(s);
    CHECK(classify_logical_error(lat, s, m, err) == std::vector<int>{1});
  }
  SECTION("chain returning to the same boundary is harmless") {
    std::vector<char> err = mask_of(
        lat, {lat.qubit_at(0, 1, 1), lat.qubit_at(1, 1, 2), lat.qubit_at(0, 1, 3)});
    SyndromeData s = extract_syndrome(lat, clean, err);
    CHECK(s.events.empty());
    MatchingResult m = mwpm_decode(s);
    CHECK(classify_logical_error(lat, s, m, err).empty());
  }
}

TEST_CASE("syndrome invariants on random instances", "[decoder]") {
  for (auto [d, T] : std::vector<std::pair<int, int>>{{3, 2}, {5, 3}}) {
    RhgLattice lat({d, T});
    SplitMix64 rng(42 * d + T);
    for (int rep = 0; rep < 60; ++rep) {
      std::vector<char> removed = apply_removals(lat, {0.05}, rng);
      SupercheckPartition part = merge_superchecks(lat, removed);
      if (part.logical_loss) continue;
      std::vector<char> dephased = assign_dephasing(lat, removed, 0.1, rng);
      SyndromeData s = extract_syndrome(lat, part, dephased);

      // parity per class: one flip per incident cell of each dephased face
      std::vector<char> parity(s.num_classes, 0);
      for (int q = 0; q < lat.num_qubits(); ++q) {
        if (!dephased[q]) continue;
        for (int side = 0; side < 2; ++side) {
          int c = lat.qubits()[q].cell[side];
          if (c >= 0) parity[s.cell_class[c]] ^= 1;
        }
      }
      parity[s.b0] = parity[s.b1] = 0;
      for (int c = 0; c < s.num_classes; ++c) CHECK(s.parity[c] == parity[c]);
      CHECK(std::is_sorted(s.events.begin(), s.events.end()));
      for (int e : s.events) {
        CHECK(s.parity[e] == 1);
        CHECK(e != s.b0);
        CHECK(e != s.b1);
      }

      // edges: exactly the surviving imperfect faces with distinct classes
      std::size_t expected_edges = 0;
      for (int q = 0; q < lat.num_qubits(); ++q) {
        const Qubit& qu = lat.qubits()[q];
        if (qu.time_boundary || removed[q]) continue;
        int a = qu.cell[0] >= 0 ? s.cell_class[qu.cell[0]] : s.b0;
        int b = qu.cell[1] >= 0 ? s.cell_class[qu.cell[1]] : s.b1;
        if (a != b) ++expected_edges;
      }
      CHECK(s.edges.size() == expected_edges);
      for (const auto& e : s.edges) {
        CHECK_FALSE(removed[e[2]]);
        CHECK(e[0] != e[1]);
      }
      CHECK(s.adj_edge.size() == 2 * s.edges.size());

      // boundary and pairwise metrics against a plain BFS
      std::vector<int> d0 = bfs_oracle(s, s.b0), d1 = bfs_oracle(s, s.b1);
      int b_max = 0;
      for (std::size_t i = 0; i < s.events.size(); ++i) {
        CHECK(s.b0_dist[i] == d0[s.events[i]]);
        CHECK(s.b1_dist[i] == d1[s.events[i]]);
        b_max = std::max(b_max, std::min(s.b0_dist[i], s.b1_dist[i]));
      }
      for (std::size_t i = 0; i < s.events.size(); ++i) {
        std::vector<int> di = bfs_oracle(s, s.events[i]);
        int cap = std::min(s.b0_dist[i], s.b1_dist[i]) + b_max;
        for (std::size_t j = 0; j < s.events.size(); ++j) {
          if (s.pair_dist[i][j] < SyndromeData::kInfDist)
            CHECK(s.pair_dist[i][j] == di[s.events[j]]);
          else
            CHECK(di[s.events[j]] > cap);
        }
      }
    }
  }
}

TEST_CASE("decoder weight matches the exhaustive assignment", "[decoder]") {
  int checked = 0;
  for (auto [d, T, pz] : std::vector<std::tuple<int, int, double>>{
           {3, 2, 0.08}, {3, 2, 0.2}, {5, 3, 0.04}, {5, 3, 0.1}}) {
    RhgLattice lat({d, T});
    SplitMix64 rng(9000 + d * 10 + static_cast<int>(pz * 100));
    for (int rep = 0; rep < 80; ++rep) {
      std::vector<char> removed = apply_removals(lat, {0.03}, rng);
      SupercheckPartition part = merge_superchecks(lat, removed);
      if (part.logical_loss) continue;
      std::vector<char> dephased = assign_dephasing(lat, removed, pz, rng);
      SyndromeData s = extract_syndrome(lat, part, dephased);
      if (s.events.size() > 10) continue;
      MatchingResult m = mwpm_decode(s);
      CHECK(m.total_weight == matching_oracle(s));
      // structural sanity of the assignment
      for (std::size_t i = 0; i < s.events.size(); ++i) {
        if (m.mate[i] >= 0) {
          CHECK(m.mate[m.mate[i]] == static_cast<int>(i));
          CHECK(s.pair_dist[i][m.mate[i]] < SyndromeData::kInfDist);
        }
      }
      std::vector<int> times = classify_logical_error(lat, s, m, dephased);
      CHECK(std::is_sorted(times.begin(), times.end()));
      CHECK(std::adjacent_find(times.begin(), times.end()) == times.end());
      for (int t : times) {
        CHECK(t >= 0);
        CHECK(t < T);
      }
      ++checked;
    }
  }
  CHECK(checked > 120);
}

TEST_CASE("no noise decodes to no error", "[decoder]") {
  RhgLattice lat({5, 3});
  std::vector<char> removed(lat.num_qubits(), 0);
  SupercheckPartition part = merge_superchecks(lat, removed);
  SyndromeData s = extract_syndrome(lat, part, removed);
  CHECK(s.events.empty());
  MatchingResult m = mwpm_decode(s);
  CHECK(m.total_weight == 0);
  CHECK(classify_logical_error(lat, s, m, removed).empty());
}

TEST_CASE("decoding is deterministic", "[decoder]") {
  RhgLattice lat({5, 3});
  SplitMix64 rng(5150);
  std::vector<char> removed = apply_removals(lat, {0.04}, rng);
  SupercheckPartition part = merge_superchecks(lat, removed);
  REQUIRE_FALSE(part.logical_loss);
  std::vector<char> dephased = assign_dephasing(lat, removed, 0.12, rng);
  SyndromeData s1 = extract_syndrome(lat, part, dephased);
  SyndromeData s2 = extract_syndrome(lat, part, dephased);
  MatchingResult m1 = mwpm_decode(s1), m2 = mwpm_decode(s2);
  CHECK(m1.total_weight == m2.total_weight);
  CHECK(m1.mate == m2.mate);
  CHECK(classify_logical_error(lat, s1, m1, dephased) ==
        classify_logical_error(lat, s2, m2, dephased));
}
