#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mtqc/rng.hpp"

// Label-level simulation of the linear-optics building blocks: the static
// Bell-state splitter B_S on one photon-mode pair, the collective n-pair Bell
// measurement built from n splitters, and the multiphoton Bell-basis
// decomposition that ties mode-level outcomes to the logical label.
// Bookkeeping is exact at the Bell-label + loss-flag level; no amplitudes are
// propagated because every verified claim is a parity or counting statement.

namespace mtqc {

enum class ModeBellLabel : std::uint8_t { phi_plus, phi_minus, psi_plus, psi_minus };
enum class LogicalBellLabel : std::uint8_t { phi_plus, phi_minus, psi_plus, psi_minus };

inline bool is_minus(ModeBellLabel l) {
  return l == ModeBellLabel::phi_minus || l == ModeBellLabel::psi_minus;
}
inline bool is_psi(ModeBellLabel l) {
  return l == ModeBellLabel::psi_plus || l == ModeBellLabel::psi_minus;
}
inline bool is_minus(LogicalBellLabel l) {
  return l == LogicalBellLabel::phi_minus || l == LogicalBellLabel::psi_minus;
}
inline bool is_psi(LogicalBellLabel l) {
  return l == LogicalBellLabel::psi_plus || l == LogicalBellLabel::psi_minus;
}

inline std::string mode_label_name(ModeBellLabel l) {
  switch (l) {
    case ModeBellLabel::phi_plus: return "phi+";
    case ModeBellLabel::phi_minus: return "phi-";
    case ModeBellLabel::psi_plus: return "psi+";
    case ModeBellLabel::psi_minus: return "psi-";
  }
  throw std::invalid_argument("malformed mode Bell label");
}

inline std::string logical_label_name(LogicalBellLabel l) {
  switch (l) {
    case LogicalBellLabel::phi_plus: return "phi_n+";
    case LogicalBellLabel::phi_minus: return "phi_n-";
    case LogicalBellLabel::psi_plus: return "psi_n+";
    case LogicalBellLabel::psi_minus: return "psi_n-";
  }
  throw std::invalid_argument("malformed logical Bell label");
}

inline ModeBellLabel make_mode_label(bool psi, bool minus) {
  return static_cast<ModeBellLabel>((psi ? 2 : 0) | (minus ? 1 : 0));
}
inline LogicalBellLabel make_logical_label(bool psi, bool minus) {
  return static_cast<LogicalBellLabel>((psi ? 2 : 0) | (minus ? 1 : 0));
}

// Equal-amplitude decomposition of each logical Bell state over mode-label
// tuples: a phi-type (psi-type) logical state expands over all-phi (all-psi)
// tuples whose count of minus labels has the parity of the logical sign;
// every term carries amplitude 2^{-(n-1)/2}.
struct BellDecomposition {
  int n = 0;
  double amplitude = 0;  // common to all terms
  // Indexed by logical label; each term is a tuple of n mode labels, listed
  // in ascending order of the minus-sign bitmask.
  std::array<std::vector<std::vector<ModeBellLabel>>, 4> terms;

  const std::vector<std::vector<ModeBellLabel>>& terms_for(LogicalBellLabel l) const {
    return terms[static_cast<int>(l)];
  }
};

inline BellDecomposition enumerate_decomposition(int n) {
  if (n < 1 || n > 12)
    throw std::invalid_argument("decomposition enumeration supports 1 <= n <= 12");
  BellDecomposition dec;
  dec.n = n;
  dec.amplitude = std::pow(2.0, -(n - 1) / 2.0);
  for (int label = 0; label < 4; ++label) {
    bool psi = (label & 2) != 0;
    bool minus = (label & 1) != 0;
    auto& list = dec.terms[label];
    list.reserve(std::size_t{1} << (n - 1));
    for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n); ++mask) {
      if ((__builtin_popcount(mask) & 1) != static_cast<int>(minus)) continue;
      std::vector<ModeBellLabel> tuple(n);
      for (int i = 0; i < n; ++i) tuple[i] = make_mode_label(psi, (mask >> i) & 1);
      list.push_back(std::move(tuple));
    }
  }
  return dec;
}

// One static Bell-state splitter. The minus-sign states produce unambiguous
// click patterns and are identified outright; the plus-sign states hit the
// unresolvable patterns and fail; a lost photon on either mode always fails.
// Over uniformly random lossless Bell inputs the success rate is exactly 1/2.
struct BsOutcome {
  bool success = false;
  ModeBellLabel identified =
      ModeBellLabel::phi_plus;  // meaningful only on success (phi- or psi-)
};

inline BsOutcome simulate_bs(ModeBellLabel input, bool lost_a, bool lost_b) {
  BsOutcome out;
  if (lost_a || lost_b) return out;
  if (is_minus(input)) {
    out.success = true;
    out.identified = input;
  }
  return out;
}

struct BsTally {
  long long trials = 0, successes = 0;
  double rate() const { return trials ? static_cast<double>(successes) / trials : 0.0; }
};

// Uniformly random Bell input with i.i.d. photon loss at rate eta.
inline BsTally sample_bs(double eta, long long trials, SplitMix64 rng) {
  if (eta < 0.0 || eta > 1.0) throw std::domain_error("eta must lie in [0, 1]");
  BsTally tally;
  tally.trials = trials;
  for (long long i = 0; i < trials; ++i) {
    auto input = static_cast<ModeBellLabel>(rng.next() & 3);
    bool lost_a = rng.bernoulli(eta);
    bool lost_b = rng.bernoulli(eta);
    if (simulate_bs(input, lost_a, lost_b).success) ++tally.successes;
  }
  return tally;
}

struct NbsmStats {
  long long trials = 0;
  long long successes = 0;          // at least one splitter succeeded
  long long correct_inferences = 0; // successes whose inferred label was right
  double failure_rate() const {
    return trials ? 1.0 - static_cast<double>(successes) / trials : 0.0;
  }
};

// Collective Bell measurement on n photon-mode pairs: prepare a uniformly
// random logical Bell state, draw one decomposition term (n-1 free sign bits
// plus the parity-fixing bit), lose each of the 2n photons independently,
// and run the n splitters. The logical type is read from any successful
// splitter, the logical sign from the parity of identified minus labels.
// Photon loss erases the lost pairs' sign information, so the effective
// post-loss label is the surviving-pair parity; that is what correctness is
// scored against.
inline NbsmStats simulate_nbsm(int n, double eta, long long trials, SplitMix64 rng) {
  if (n < 1 || n > 63) throw std::invalid_argument("pair count n must lie in [1, 63]");
  if (eta < 0.0 || eta > 1.0) throw std::domain_error("eta must lie in [0, 1]");
  NbsmStats stats;
  stats.trials = trials;
  for (long long trial = 0; trial < trials; ++trial) {
    auto prepared = static_cast<LogicalBellLabel>(rng.next() & 3);
    bool psi = is_psi(prepared);
    std::uint64_t mask = 0;
    if (n > 1) mask = rng.next() & ((std::uint64_t{1} << (n - 1)) - 1);
    if ((__builtin_popcountll(mask) & 1) != static_cast<int>(is_minus(prepared)))
      mask |= std::uint64_t{1} << (n - 1);  // parity-fixing final pair

    int identified_minus = 0;
    int surviving_minus = 0;
    bool any_success = false;
    for (int i = 0; i < n; ++i) {
      bool lost_a = rng.bernoulli(eta);
      bool lost_b = rng.bernoulli(eta);
      ModeBellLabel mode = make_mode_label(psi, (mask >> i) & 1);
      if (!lost_a && !lost_b && is_minus(mode)) ++surviving_minus;
      BsOutcome out = simulate_bs(mode, lost_a, lost_b);
      if (out.success) {
        any_success = true;
        if (is_minus(out.identified)) ++identified_minus;
      }
    }
    if (!any_success) continue;
    ++stats.successes;
    LogicalBellLabel inferred = make_logical_label(psi, identified_minus & 1);
    LogicalBellLabel effective = make_logical_label(psi, surviving_minus & 1);
    if (inferred == effective) ++stats.correct_inferences;
  }
  return stats;
}

// Exact lossless success rate by enumeration: over the four logical labels
// and all decomposition terms, the measurement fails only on the two all-plus
// tuples, giving 1 - 2^{-n}.
inline double enumerated_nbsm_success_rate(int n) {
  BellDecomposition dec = enumerate_decomposition(n);
  long long total = 0, good = 0;
  for (int label = 0; label < 4; ++label)
    for (const auto& tuple : dec.terms[label]) {
      ++total;
      for (ModeBellLabel m : tuple)
        if (is_minus(m)) {
          ++good;
          break;
        }
    }
  return static_cast<double>(good) / static_cast<double>(total);
}

enum class ResourceStateKind { C3, C3prime };

// Success rate of heralded resource-state generation: one splitter success
// per level of the GHZ-growing tree (ceil(log2 n) levels for C3, one fewer
// pair for C3prime) plus the final two assembly steps; each splitter succeeds
// with rate (1-eta)^2/2.
inline double resource_state_success_rate(int n, int m, ResourceStateKind kind,
                                          double eta) {
  if (n < 2) throw std::invalid_argument("photon count n must be >= 2");
  if (m < 2) throw std::invalid_argument("arm count m must be >= 2");
  if (eta < 0.0 || eta > 1.0) throw std::domain_error("eta must lie in [0, 1]");
  auto ceil_log2 = [](int v) {
    int k = 0;
    while ((1 << k) < v) ++k;
    return k;
  };
  int levels = kind == ResourceStateKind::C3 ? ceil_log2(n) : ceil_log2(n - 1);
  double s = (1.0 - eta) * (1.0 - eta) / 2.0;
  return std::pow(s, levels + 2);
}

}  // namespace mtqc
