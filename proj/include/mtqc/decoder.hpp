#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "mtqc/lattice.hpp"
#include "mtqc/matching.hpp"
#include "mtqc/rng.hpp"

// Loss-aware decoding pipeline for the simulated lattice:
//   1. apply_removals       - i.i.d. qubit removals, one draw per mechanism
//   2. merge_superchecks    - union checks across removed faces; detect the
//                             unrecoverable case where the two x boundaries
//                             merge (logical loss)
//   3. assign_dephasing     - i.i.d. Z flips on the surviving qubits
//   4. extract_syndrome     - parities of the merged checks plus a distance
//                             oracle on the deformed check graph
//   5. mwpm_decode          - minimum-weight matching of parity events against
//                             each other and the two x boundaries
//   6. classify_logical_error - residual (error + correction) homology; lists
//                             the simulating-time steps whose residual chains
//                             span the two x boundaries

namespace mtqc {

// One independent removal draw per mechanism per qubit; a qubit is removed if
// any mechanism fires. Draws are consumed in qubit-id-ascending order, all
// mechanisms per qubit (no short-circuit), so streams stay aligned across
// parameter sets. Faces on the perfect time boundaries consume no draws.
inline std::vector<char> apply_removals(const RhgLattice& lat,
                                        const std::vector<double>& mechanism_probs,
                                        SplitMix64& rng) {
  std::vector<char> removed(lat.num_qubits(), 0);
  for (int q = 0; q < lat.num_qubits(); ++q) {
    if (lat.qubits()[q].time_boundary) continue;
    bool gone = false;
    for (double p : mechanism_probs) gone |= rng.bernoulli(p);
    removed[q] = gone;
  }
  return removed;
}

struct SupercheckPartition {
  std::vector<int> cls;  // resolved class id per cell, plus the two boundaries
  int b0 = -1, b1 = -1;  // class ids of the x = 0 and x = 2(d-1) boundaries
  bool logical_loss = false;  // boundaries ended up in one class
};

// Union checks across every removed face. A removed face in the bulk merges
// its two cells; a removed face on an x boundary merges its cell with that
// boundary's class. Loss of correctability is exactly the event that the two
// boundary classes meet.
inline SupercheckPartition merge_superchecks(const RhgLattice& lat,
                                             const std::vector<char>& removed) {
  if (static_cast<int>(removed.size()) != lat.num_qubits())
    throw std::invalid_argument("removal mask size mismatch");
  const int nc = lat.num_cells();
  std::vector<int> parent(nc + 2);
  for (int i = 0; i < nc + 2; ++i) parent[i] = i;
  auto find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  auto unite = [&](int a, int b) { parent[find(a)] = find(b); };

  const int b0 = nc, b1 = nc + 1;
  for (int q = 0; q < lat.num_qubits(); ++q) {
    if (!removed[q]) continue;
    const Qubit& qu = lat.qubits()[q];
    int a = qu.cell[0] >= 0 ? qu.cell[0] : (qu.x_low ? b0 : -1);
    int b = qu.cell[1] >= 0 ? qu.cell[1] : (qu.x_high ? b1 : -1);
    if (a < 0 || b < 0) continue;  // five-face checks have no face here at all
    unite(a, b);
  }

  SupercheckPartition part;
  part.cls.resize(nc + 2);
  for (int i = 0; i < nc + 2; ++i) part.cls[i] = find(i);
  part.b0 = part.cls[b0];
  part.b1 = part.cls[b1];
  part.logical_loss = part.b0 == part.b1;
  return part;
}

// Z flips with probability p_z on every surviving face qubit, drawn in qubit
// id order; removed qubits and perfect time-boundary faces draw nothing.
inline std::vector<char> assign_dephasing(const RhgLattice& lat,
                                          const std::vector<char>& removed, double p_z,
                                          SplitMix64& rng) {
  if (static_cast<int>(removed.size()) != lat.num_qubits())
    throw std::invalid_argument("removal mask size mismatch");
  if (p_z < 0.0 || p_z > 1.0) throw std::domain_error("p_z must lie in [0, 1]");
  std::vector<char> dephased(lat.num_qubits(), 0);
  for (int q = 0; q < lat.num_qubits(); ++q) {
    if (removed[q] || lat.qubits()[q].time_boundary) continue;
    dephased[q] = rng.bernoulli(p_z);
  }
  return dephased;
}

// Deformed check graph: one node per merged check class plus the two
// boundaries, one unit-weight edge per surviving face whose two sides fall in
// different classes (faces interior to a class are invisible to matching).
struct SyndromeData {
  static constexpr int kInfDist = std::numeric_limits<int>::max() / 4;

  int num_classes = 0;
  int b0 = -1, b1 = -1;            // compressed boundary class ids
  std::vector<int> cell_class;     // cell -> compressed class id
  std::vector<std::array<int, 3>> edges;  // {class a, class b, qubit id}
  std::vector<int> adj_start;      // CSR over classes into adj_edge
  std::vector<int> adj_edge;       // edge indices, insertion (qubit id) order
  std::vector<char> parity;        // per class; boundaries stay 0
  std::vector<int> events;         // classes with odd parity, ascending
  std::vector<int> b0_dist, b1_dist;      // per event
  std::vector<std::vector<int>> pair_dist;  // dense, kInfDist when far apart

  int other_end(int edge_index, int cls) const {
    const auto& e = edges[edge_index];
    return e[0] == cls ? e[1] : e[0];
  }
};

namespace detail {

inline void bfs_classes(const SyndromeData& s, int source, std::vector<int>& dist,
                        int cap = SyndromeData::kInfDist) {
  dist.assign(s.num_classes, SyndromeData::kInfDist);
  std::vector<int> queue;
  queue.reserve(s.num_classes);
  dist[source] = 0;
  queue.push_back(source);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    int u = queue[head];
    if (dist[u] >= cap) continue;
    for (int k = s.adj_start[u]; k < s.adj_start[u + 1]; ++k) {
      int v = s.other_end(s.adj_edge[k], u);
      if (dist[v] > dist[u] + 1) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
}

}  // namespace detail

inline SyndromeData extract_syndrome(const RhgLattice& lat,
                                     const SupercheckPartition& part,
                                     const std::vector<char>& dephased) {
  if (part.logical_loss)
    throw std::invalid_argument("cannot extract a syndrome after logical loss");
  if (static_cast<int>(dephased.size()) != lat.num_qubits())
    throw std::invalid_argument("dephasing mask size mismatch");

  SyndromeData s;
  // Compress class roots to dense ids, cells first in id order, boundaries
  // last; merged boundaries inherit the first id of their class.
  std::vector<int> root_to_id(lat.num_cells() + 2, -1);
  auto id_of = [&](int root) {
    if (root_to_id[root] < 0) root_to_id[root] = s.num_classes++;
    return root_to_id[root];
  };
  s.cell_class.resize(lat.num_cells());
  for (int c = 0; c < lat.num_cells(); ++c) s.cell_class[c] = id_of(part.cls[c]);
  s.b0 = id_of(part.b0);
  s.b1 = id_of(part.b1);

  auto side_class = [&](const Qubit& q, int side) {
    if (q.cell[side] >= 0) return s.cell_class[q.cell[side]];
    return q.x_low ? s.b0 : s.b1;
  };

  // Parities from the dephased survivors; flips landing on a boundary class
  // are absorbed there.
  s.parity.assign(s.num_classes, 0);
  for (int q = 0; q < lat.num_qubits(); ++q) {
    if (!dephased[q]) continue;
    const Qubit& qu = lat.qubits()[q];
    for (int side = 0; side < 2; ++side) {
      if (qu.cell[side] < 0) continue;
      int cid = s.cell_class[qu.cell[side]];
      if (cid != s.b0 && cid != s.b1) s.parity[cid] ^= 1;
    }
  }

  // Edges: one per surviving non-perfect face joining two distinct classes.
  for (int q = 0; q < lat.num_qubits(); ++q) {
    const Qubit& qu = lat.qubits()[q];
    if (qu.time_boundary) continue;
    int a = side_class(qu, 0), b = side_class(qu, 1);
    if (a == b) continue;  // removed, or interior to a merged class
    s.edges.push_back({a, b, q});
  }
  // (Removed faces always have both sides merged, so they were skipped too.)
  s.adj_start.assign(s.num_classes + 1, 0);
  for (const auto& e : s.edges) {
    ++s.adj_start[e[0] + 1];
    ++s.adj_start[e[1] + 1];
  }
  for (int c = 0; c < s.num_classes; ++c) s.adj_start[c + 1] += s.adj_start[c];
  s.adj_edge.assign(s.adj_start[s.num_classes], 0);
  {
    std::vector<int> cursor(s.adj_start.begin(), s.adj_start.end() - 1);
    for (int i = 0; i < static_cast<int>(s.edges.size()); ++i) {
      s.adj_edge[cursor[s.edges[i][0]]++] = i;
      s.adj_edge[cursor[s.edges[i][1]]++] = i;
    }
  }

  for (int c = 0; c < s.num_classes; ++c)
    if (s.parity[c] && c != s.b0 && c != s.b1) s.events.push_back(c);

  std::vector<int> dist;
  detail::bfs_classes(s, s.b0, dist);
  s.b0_dist.resize(s.events.size());
  for (std::size_t i = 0; i < s.events.size(); ++i) s.b0_dist[i] = dist[s.events[i]];
  detail::bfs_classes(s, s.b1, dist);
  s.b1_dist.resize(s.events.size());
  for (std::size_t i = 0; i < s.events.size(); ++i) s.b1_dist[i] = dist[s.events[i]];

  // Pairwise distances; anything beyond b_u + max_v(b_v) - 1 can never beat
  // matching both endpoints to their boundaries, so the search is capped.
  int b_max = 0;
  for (std::size_t i = 0; i < s.events.size(); ++i)
    b_max = std::max(b_max, std::min(s.b0_dist[i], s.b1_dist[i]));
  s.pair_dist.assign(s.events.size(), std::vector<int>(s.events.size(), SyndromeData::kInfDist));
  std::vector<int> pos(s.num_classes, -1);
  for (std::size_t i = 0; i < s.events.size(); ++i) pos[s.events[i]] = static_cast<int>(i);
  for (std::size_t i = 0; i < s.events.size(); ++i) {
    int cap = std::min(s.b0_dist[i], s.b1_dist[i]) + b_max;  // strict bound + 1 slack
    detail::bfs_classes(s, s.events[i], dist, cap);
    for (int c = 0; c < s.num_classes; ++c)
      if (pos[c] >= 0 && dist[c] < SyndromeData::kInfDist)
        s.pair_dist[i][pos[c]] = dist[c];
    s.pair_dist[i][i] = 0;
  }
  return s;
}

struct MatchingResult {
  std::vector<int> mate;            // per event: partner event index, -1 = boundary
  std::vector<std::int8_t> boundary_side;  // per event, used when mate == -1
  std::int64_t total_weight = 0;    // summed correction-chain length
};

// Pair events when doing so is strictly cheaper than sending both to their
// nearest boundaries; everything else matches to its nearest boundary. The
// positive-gain graph decomposes into components solved independently.
inline MatchingResult mwpm_decode(const SyndromeData& s) {
  const int n = static_cast<int>(s.events.size());
  MatchingResult res;
  res.mate.assign(n, -1);
  res.boundary_side.assign(n, 0);

  std::vector<std::int64_t> bdist(n);
  for (int i = 0; i < n; ++i) {
    bdist[i] = std::min(s.b0_dist[i], s.b1_dist[i]);
    res.boundary_side[i] = s.b0_dist[i] <= s.b1_dist[i] ? 0 : 1;
    res.total_weight += bdist[i];
  }

  // Components of the positive-gain graph.
  std::vector<int> comp(n);
  for (int i = 0; i < n; ++i) comp[i] = i;
  auto find = [&](int x) {
    while (comp[x] != x) {
      comp[x] = comp[comp[x]];
      x = comp[x];
    }
    return x;
  };
  auto gain = [&](int i, int j) -> std::int64_t {
    int w = s.pair_dist[i][j];
    if (w >= SyndromeData::kInfDist) return 0;
    return std::max<std::int64_t>(0, bdist[i] + bdist[j] - w);
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (gain(i, j) > 0) comp[find(i)] = find(j);

  std::vector<std::vector<int>> members(n);
  for (int i = 0; i < n; ++i) members[find(i)].push_back(i);
  for (const auto& grp : members) {
    if (grp.size() < 2) continue;
    MaxWeightMatching mwm(static_cast<int>(grp.size()));
    for (std::size_t a = 0; a < grp.size(); ++a)
      for (std::size_t b = a + 1; b < grp.size(); ++b) {
        std::int64_t g = gain(grp[a], grp[b]);
        if (g > 0) mwm.add_edge(static_cast<int>(a), static_cast<int>(b), g);
      }
    MatchingSolution sol = mwm.solve();
    res.total_weight -= sol.total_weight;
    for (std::size_t a = 0; a < grp.size(); ++a)
      if (sol.mate[a] >= 0) res.mate[grp[a]] = grp[sol.mate[a]];
  }
  return res;
}

namespace detail {

// Shortest path between two classes; returns the edge indices along one
// deterministic shortest path (parents fixed by first discovery in CSR
// order).
inline void append_path_edges(const SyndromeData& s, int from, int to,
                              std::vector<int>& out_edges) {
  if (from == to) return;
  std::vector<int> parent_edge(s.num_classes, -1), dist(s.num_classes,
                                                        SyndromeData::kInfDist);
  std::vector<int> queue;
  queue.reserve(s.num_classes);
  dist[from] = 0;
  queue.push_back(from);
  for (std::size_t head = 0; head < queue.size() && dist[to] == SyndromeData::kInfDist;
       ++head) {
    int u = queue[head];
    for (int k = s.adj_start[u]; k < s.adj_start[u + 1]; ++k) {
      int e = s.adj_edge[k];
      int v = s.other_end(e, u);
      if (dist[v] > dist[u] + 1) {
        dist[v] = dist[u] + 1;
        parent_edge[v] = e;
        queue.push_back(v);
      }
    }
  }
  if (dist[to] >= SyndromeData::kInfDist)
    throw std::logic_error("matched classes are disconnected");
  for (int c = to; c != from;) {
    int e = parent_edge[c];
    out_edges.push_back(e);
    c = s.other_end(e, c);
  }
}

}  // namespace detail

// Applies the matched correction, forms the residual chain set, and walks its
// trails from the x = 0 boundary: every trail that ends on the opposite
// boundary is a spanning (logical) error, attributed to the simulating-time
// step of its starting face. Returns the sorted distinct erroneous steps.
inline std::vector<int> classify_logical_error(const RhgLattice& lat,
                                               const SyndromeData& s,
                                               const MatchingResult& match,
                                               const std::vector<char>& dephased) {
  std::vector<int> path_edges;
  for (std::size_t i = 0; i < s.events.size(); ++i) {
    int m = match.mate[i];
    if (m >= 0) {
      if (m > static_cast<int>(i))
        detail::append_path_edges(s, s.events[i], s.events[m], path_edges);
    } else {
      detail::append_path_edges(s, s.events[i],
                                match.boundary_side[i] == 0 ? s.b0 : s.b1, path_edges);
    }
  }

  std::vector<char> residual(lat.num_qubits(), 0);
  for (int q = 0; q < lat.num_qubits(); ++q) residual[q] = dephased[q];
  for (int e : path_edges) residual[s.edges[e][2]] ^= 1;

  // Residual chain graph over classes; insertion in qubit id order keeps the
  // trail decomposition deterministic.
  struct REdge {
    int a, b, qubit;
  };
  std::vector<REdge> redges;
  std::vector<std::vector<int>> radj(s.num_classes);
  for (int q = 0; q < lat.num_qubits(); ++q) {
    if (!residual[q]) continue;
    const Qubit& qu = lat.qubits()[q];
    if (qu.time_boundary) continue;
    int a = qu.cell[0] >= 0 ? s.cell_class[qu.cell[0]] : s.b0;  // only x_low lacks side 0
    int b = qu.cell[1] >= 0 ? s.cell_class[qu.cell[1]] : s.b1;  // only x_high lacks side 1
    if (a == b) continue;  // interior to a merged class: no homology progress
    int id = static_cast<int>(redges.size());
    redges.push_back({a, b, q});
    radj[a].push_back(id);
    radj[b].push_back(id);
  }

  std::vector<char> used(redges.size(), 0);
  std::vector<std::size_t> cursor(s.num_classes, 0);
  std::vector<int> times;
  const int T = lat.T();
  for (int start : radj[s.b0]) {
    if (used[start]) continue;
    used[start] = 1;
    const REdge& se = redges[start];
    int cur = se.a == s.b0 ? se.b : se.a;
    while (cur != s.b0 && cur != s.b1) {
      std::size_t& k = cursor[cur];
      while (k < radj[cur].size() && used[radj[cur][k]]) ++k;
      if (k >= radj[cur].size())
        throw std::logic_error("residual chain dead-ends off the boundaries");
      int e = radj[cur][k];
      used[e] = 1;
      cur = redges[e].a == cur ? redges[e].b : redges[e].a;
    }
    if (cur == s.b1) {
      int t = lat.qubits()[se.qubit].t / 2;
      times.push_back(std::min(t, T - 1));
    }
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  return times;
}

// Faces incident to exactly one cell of the given class: the measurement
// support of the merged supercheck (useful for inspecting deformations).
inline std::vector<int> supercheck_support(const RhgLattice& lat,
                                           const SupercheckPartition& part,
                                           int class_id) {
  std::vector<int> support;
  for (int q = 0; q < lat.num_qubits(); ++q) {
    const Qubit& qu = lat.qubits()[q];
    int hits = 0;
    for (int side = 0; side < 2; ++side)
      if (qu.cell[side] >= 0 && part.cls[qu.cell[side]] == class_id) ++hits;
    if (hits == 1) support.push_back(q);
  }
  return support;
}

}  // namespace mtqc
