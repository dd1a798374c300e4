#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "mtqc/lattice.hpp"
#include "mtqc/noise.hpp"

// Resource accounting: the balanced GHZ-growing plan and its closed-form
// cost, lossy consumption recursions, the encoded-central-qubit pipeline,
// star-cluster and per-gate overheads, and PPO counting for the
// temporal-mode comparison.

namespace mtqc {

// Per-splitter success rate convention. The exact two-photon pass factor is
// (1-eta)^2; the linearized variant (1-2*eta) drops the quadratic term and is
// offered for matching reference figures computed that way.
enum class CostModel { exact, linearized };

inline double two_photon_pass(double eta, CostModel model = CostModel::exact) {
  if (eta < 0.0 || eta >= 1.0) throw std::domain_error("eta must lie in [0, 1)");
  double pass = model == CostModel::exact ? (1.0 - eta) * (1.0 - eta) : 1.0 - 2.0 * eta;
  if (pass <= 0.0)
    throw std::domain_error("per-splitter success vanishes at this loss rate");
  return pass;
}

inline double bs_success(double eta, CostModel model = CostModel::exact) {
  return two_photon_pass(eta, model) / 2.0;
}

// Balanced fusion plan: m-2 three-photon ingredients are split top-down into
// halves of ceil/floor size, giving depth ceil(log2(m-2)) and the minimal
// mean cost. Rounds are listed in execution order; each fusion of sizes
// (a, b) produces a + b - 2.
struct GhzPlan {
  struct Fusion {
    int left = 3, right = 3;
    int result() const { return left + right - 2; }
  };

  int target = 3;
  std::vector<std::vector<Fusion>> rounds;  // rounds[0] runs first

  int depth() const { return static_cast<int>(rounds.size()); }
  int leaf_count() const { return target - 2; }
};

namespace detail {

// Builds the balanced subtree over `leaves` ingredients; returns the subtree's
// state size and records its fusion in rounds[height-1]. Left (larger) half
// first keeps the plan deterministic.
inline int plan_subtree(int leaves, std::vector<std::vector<GhzPlan::Fusion>>& rounds,
                        int& height) {
  if (leaves == 1) {
    height = 0;
    return 3;
  }
  int hl = 0, hr = 0;
  int left = plan_subtree((leaves + 1) / 2, rounds, hl);
  int right = plan_subtree(leaves / 2, rounds, hr);
  height = 1 + std::max(hl, hr);
  if (static_cast<int>(rounds.size()) < height) rounds.resize(height);
  rounds[height - 1].push_back({left, right});
  return left + right - 2;
}

}  // namespace detail

inline GhzPlan plan_ghz(int m) {
  if (m < 3) throw std::invalid_argument("GHZ target size must be >= 3");
  GhzPlan plan;
  plan.target = m;
  if (m == 3) return plan;  // the ingredient itself
  int height = 0;
  int size = detail::plan_subtree(m - 2, plan.rounds, height);
  if (size != m) throw std::logic_error("fusion plan size bookkeeping broke");
  return plan;
}

// Lossless mean cost in three-photon ingredients, closed form.
inline double ghz_cost_closed_form(int m) {
  if (m < 3) throw std::invalid_argument("GHZ target size must be >= 3");
  int M = m - 2;
  int k = 0;
  while ((1 << (k + 1)) <= M) ++k;  // floor(log2 M)
  double pk = static_cast<double>(1 << k);
  return 3.0 * M * pk - 2.0 * pk * pk;
}

// Mean three-photon-state consumption of the balanced plan: each fusion
// retries until success, consuming fresh copies of both inputs per attempt.
inline double ghz_cost(int m, double eta, CostModel model = CostModel::exact) {
  if (m < 3) throw std::invalid_argument("GHZ target size must be >= 3");
  double s = bs_success(eta, model);
  // cost over the balanced subtree with `leaves` ingredients
  std::unordered_map<int, double> memo;
  auto cost = [&](auto&& self, int leaves) -> double {
    if (leaves == 1) return 1.0;
    auto it = memo.find(leaves);
    if (it != memo.end()) return it->second;
    double c = (self(self, (leaves + 1) / 2) + self(self, leaves / 2)) / s;
    memo.emplace(leaves, c);
    return c;
  };
  return cost(cost, m - 2);
}

// Encoded central qubit: fuse a rotated GHZ_{m+1} with a GHZ_5, then attach
// two further GHZ_{m+1}'s through a second-stage double fusion.
inline double enc_cost(int m, double eta, CostModel model = CostModel::exact) {
  if (m < 2) throw std::invalid_argument("arm count m must be >= 2");
  double s = bs_success(eta, model);
  double first = (ghz_cost(m + 1, eta, model) + ghz_cost(5, eta, model)) / s;
  return (first + 2.0 * ghz_cost(m + 1, eta, model)) / (s * s);
}

// Mean ingredient count per star cluster: six (n+1)-arms, two (n+2)-arms and
// the central part, all pushed through the two-photon delay pass twice; the
// two-step variant pays the squared fusion-survival penalty on top.
inline double star_cost(int n, int m, double eta, Variant variant, bool encoded,
                        CostModel model = CostModel::exact) {
  if (n < 3) throw std::invalid_argument("arm photon count n must be >= 3");
  if (m < 2) throw std::invalid_argument("central arm count m must be >= 2");
  double core = 6.0 * ghz_cost(n + 1, eta, model) + 2.0 * ghz_cost(n + 2, eta, model) +
                (encoded ? enc_cost(m, eta, model) : ghz_cost(m + 2, eta, model));
  double pass = two_photon_pass(eta, model);
  double cost = 4.0 * core / (pass * pass);
  if (variant == Variant::mtqc2) {
    double p_f = nbsm_failure_rate(eta, n);  // exact rate in either cost model
    cost /= (1.0 - p_f) * (1.0 - p_f);
  }
  return cost;
}

// Mean ingredient count per logical gate at distance d: the star-cluster cost
// scaled by the lattice qubits a gate consumes (375 d^3 / 32).
inline double gate_overhead(int n, int m, double eta, Variant variant, bool encoded,
                            int d, CostModel model = CostModel::exact) {
  return star_cost(n, m, eta, variant, encoded, model) * count_lattice_qubits_for_gate(d);
}

// Heralded-operation counting with full-restart semantics: a node's operation
// succeeds with its heralding rate; a failure discards both freshly built
// inputs, so cost = (sum of child costs + 1) / heralding. Leaves are free
// polarization ingredients.
struct PpoTree {
  double heralding = 0.5;
  std::vector<PpoTree> children;

  bool is_leaf() const { return children.empty(); }
};

inline double ppo_cost(const PpoTree& node) {
  if (node.is_leaf()) return 0.0;
  if (!(node.heralding > 0.0) || node.heralding > 1.0)
    throw std::invalid_argument("heralding rate must lie in (0, 1]");
  double sum = 1.0;  // the entangling operation itself is one heralded pulse
  for (const PpoTree& child : node.children) sum += ppo_cost(child);
  return sum / node.heralding;
}

// The balanced GHZ-growing tree expressed as heralded operations.
inline PpoTree ppo_tree_ghz(int m) {
  if (m < 3) throw std::invalid_argument("GHZ target size must be >= 3");
  auto build = [](auto&& self, int leaves) -> PpoTree {
    PpoTree node;
    if (leaves == 1) return node;
    node.heralding = 0.5;
    node.children.push_back(self(self, (leaves + 1) / 2));
    node.children.push_back(self(self, leaves / 2));
    return node;
  };
  return build(build, m - 2);
}

// Star resource state assembled from two n-arm parts and the central part:
// fuse(fuse(GHZ_{n+1}, GHZ_{m_central+2}), GHZ_{n+1}).
inline PpoTree ppo_tree_resource_state(int n, int m_central) {
  if (n < 2) throw std::invalid_argument("arm photon count n must be >= 2");
  if (m_central < 1) throw std::invalid_argument("central arm count must be >= 1");
  PpoTree inner;
  inner.heralding = 0.5;
  inner.children.push_back(ppo_tree_ghz(n + 1));
  inner.children.push_back(ppo_tree_ghz(m_central + 2));
  PpoTree outer;
  outer.heralding = 0.5;
  outer.children.push_back(std::move(inner));
  outer.children.push_back(ppo_tree_ghz(n + 1));
  return outer;
}

// Round-count comparison for sequential temporal-mode generation: stages run
// one after another and the tally is the product of expected repetitions.
inline double tm_round_ppo(const std::vector<double>& stage_success) {
  double total = 1.0;
  for (double p : stage_success) {
    if (!(p > 0.0) || p > 1.0)
      throw std::invalid_argument("stage success rate must lie in (0, 1]");
    total /= p;
  }
  return total;
}

}  // namespace mtqc
