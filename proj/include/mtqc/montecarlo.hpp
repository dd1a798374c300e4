#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "mtqc/decoder.hpp"
#include "mtqc/lattice.hpp"
#include "mtqc/noise.hpp"
#include "mtqc/rng.hpp"

// Sampling harness: repeated removal + dephasing + decode trials, aggregated
// into a logical error rate per unit simulating time, plus threshold location
// from curve crossings and code-distance extrapolation.

namespace mtqc {

struct SimJob {
  LatticeConfig lattice;
  NoiseParams noise;
  // When set, these shortcut the closed forms derived from (eta, n, m, N_rep).
  std::optional<double> p_f_override;
  std::optional<double> p_z_override;
  long long trials = 10000;
  std::uint64_t seed = 42;

  void validate() const {
    lattice.validate();
    noise.validate();
    if (trials < 1) throw std::invalid_argument("trial budget must be >= 1");
  }
};

struct EffectiveRates {
  double p_f = 0, p_z = 0;
};

// Physical rates driving a job: the failure rate of the n-photon fusion and
// the per-lattice-qubit dephasing rate (per-photon rate at l = m segments,
// majority-voted over the N_rep repetition code).
inline EffectiveRates effective_rates(const SimJob& job) {
  EffectiveRates r;
  r.p_f = job.p_f_override ? *job.p_f_override : nbsm_failure_rate(job.noise.eta, job.noise.n);
  r.p_z = job.p_z_override
              ? *job.p_z_override
              : encoded_dephasing(dephasing_rate(job.noise.eta, job.noise.m), job.noise.N_rep);
  return r;
}

struct SimResult {
  double p_L = 0;                 // erroneous / total simulating times
  double ci99 = 0;                // 99% confidence half-width on p_L
  double logical_loss_rate = 0;   // fraction of trials aborted by loss
  long long trials = 0;
  long long lost_trials = 0;
  long long erroneous_times = 0;  // tally across non-lost trials
  long long total_times = 0;      // T * (trials - lost_trials)
  double p_f = 0, p_z = 0;        // effective rates the job ran with
};

struct WilsonInterval {
  double lo = 0, hi = 1;
};

inline constexpr double kZ99 = 2.5758293035489004;  // two-sided 99% normal quantile

inline WilsonInterval wilson_interval(long long successes, long long trials,
                                      double z = kZ99) {
  if (trials <= 0) return {0.0, 1.0};
  double n = static_cast<double>(trials);
  double phat = static_cast<double>(successes) / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (phat + z2 / (2.0 * n)) / denom;
  double half = z / denom * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

struct TrialOutcome {
  bool lost = false;
  std::vector<int> erroneous_times;
};

inline TrialOutcome run_trial(const RhgLattice& lat,
                              const std::vector<double>& mechanism_probs, double p_z,
                              SplitMix64 rng) {
  TrialOutcome out;
  std::vector<char> removed = apply_removals(lat, mechanism_probs, rng);
  SupercheckPartition part = merge_superchecks(lat, removed);
  if (part.logical_loss) {
    out.lost = true;
    return out;
  }
  std::vector<char> dephased = assign_dephasing(lat, removed, p_z, rng);
  SyndromeData synd = extract_syndrome(lat, part, dephased);
  MatchingResult match = mwpm_decode(synd);
  out.erroneous_times = classify_logical_error(lat, synd, match, dephased);
  return out;
}

// Runs the trial budget across workers. Trial i always derives its stream from
// (master seed, i) and tallies are integer sums, so the result is bit-identical
// for any worker count. workers = 0 picks the hardware concurrency.
inline SimResult run_job(const SimJob& job, int workers = 0) {
  job.validate();
  if (workers <= 0) {
    unsigned hc = std::thread::hardware_concurrency();
    workers = hc == 0 ? 1 : static_cast<int>(hc);
  }
  workers = static_cast<int>(std::min<long long>(workers, job.trials));

  const RhgLattice lat(job.lattice);
  const EffectiveRates rates = effective_rates(job);
  const std::vector<double> mechanisms =
      removal_mechanisms(rates.p_f, job.noise.variant, job.noise.mtqc2_half_rate_removal);

  struct Partial {
    long long lost = 0, erroneous = 0;
  };
  std::vector<Partial> partials(workers);
  auto work = [&](int w, long long lo, long long hi) {
    Partial& p = partials[w];
    for (long long i = lo; i < hi; ++i) {
      TrialOutcome t = run_trial(lat, mechanisms, rates.p_z, substream(job.seed, i));
      if (t.lost)
        ++p.lost;
      else
        p.erroneous += static_cast<long long>(t.erroneous_times.size());
    }
  };

  if (workers == 1) {
    work(0, 0, job.trials);
  } else {
    std::vector<std::thread> pool;
    long long chunk = (job.trials + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      long long lo = w * chunk, hi = std::min<long long>(job.trials, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(work, w, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  SimResult res;
  res.trials = job.trials;
  res.p_f = rates.p_f;
  res.p_z = rates.p_z;
  for (const Partial& p : partials) {
    res.lost_trials += p.lost;
    res.erroneous_times += p.erroneous;
  }
  res.logical_loss_rate = static_cast<double>(res.lost_trials) / job.trials;
  res.total_times = static_cast<long long>(job.lattice.T) * (job.trials - res.lost_trials);
  if (res.total_times > 0) {
    res.p_L = static_cast<double>(res.erroneous_times) / res.total_times;
    WilsonInterval ci = wilson_interval(res.erroneous_times, res.total_times);
    res.ci99 = std::max(ci.hi - res.p_L, res.p_L - ci.lo);
  } else {
    res.p_L = 0.0;  // every trial lost: no time steps observed
    res.ci99 = 0.5;
  }
  return res;
}

struct ThresholdCurve {
  int d = 0;
  std::vector<double> p_z;  // shared grid, strictly increasing
  std::vector<double> p_L;  // aligned with p_z
};

struct ThresholdEstimate {
  bool found = false;
  double p_z_th = 0;
  double uncertainty = 0;
  std::vector<double> pair_crossings;  // one per adjacent-d pair, when found
  std::string diagnostic;              // set when !found
};

// Threshold = where p_L curves for increasing d cross. For each adjacent d
// pair the sign change of log p_L(d_small) - log p_L(d_large) is located by
// linear interpolation; the pair of the two largest d gives the estimate and
// the spread across pairs (floored at half a grid step) the uncertainty.
inline ThresholdEstimate find_threshold(std::vector<ThresholdCurve> curves) {
  ThresholdEstimate est;
  if (curves.size() < 2) throw std::invalid_argument("need curves for at least two d");
  std::sort(curves.begin(), curves.end(),
            [](const ThresholdCurve& a, const ThresholdCurve& b) { return a.d < b.d; });
  const std::vector<double>& grid = curves.front().p_z;
  if (grid.size() < 3)
    throw std::invalid_argument("need at least three dephasing points");
  for (const auto& c : curves) {
    if (c.p_z != grid) throw std::invalid_argument("curves must share one dephasing grid");
    if (c.p_L.size() != grid.size())
      throw std::invalid_argument("curve length mismatch");
  }

  constexpr double kFloor = 1e-12;  // keeps log finite when no error was seen
  auto crossing_of = [&](const ThresholdCurve& small, const ThresholdCurve& large,
                         double& out) {
    std::vector<double> delta(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j)
      delta[j] = std::log(std::max(small.p_L[j], kFloor)) -
                 std::log(std::max(large.p_L[j], kFloor));
    for (std::size_t j = 0; j + 1 < grid.size(); ++j)
      if (delta[j] >= 0.0 && delta[j + 1] < 0.0) {
        out = grid[j] + delta[j] * (grid[j + 1] - grid[j]) / (delta[j] - delta[j + 1]);
        return true;
      }
    return false;
  };

  double top_crossing = 0;
  bool top_found = false;
  for (std::size_t i = 0; i + 1 < curves.size(); ++i) {
    double c;
    if (crossing_of(curves[i], curves[i + 1], c)) {
      est.pair_crossings.push_back(c);
      if (i + 2 == curves.size()) {
        top_crossing = c;
        top_found = true;
      }
    }
  }
  if (!top_found) {
    const ThresholdCurve& a = curves[curves.size() - 2];
    const ThresholdCurve& b = curves.back();
    double gap_lo = b.p_L.front() - a.p_L.front();
    est.diagnostic = gap_lo >= 0
                         ? "no crossing: grid looks entirely supercritical "
                           "(larger d already worse at the lowest point)"
                         : "no crossing: grid looks entirely subcritical "
                           "(larger d still better at the highest point)";
    return est;
  }

  est.found = true;
  est.p_z_th = top_crossing;
  double spread = 0;
  for (double c : est.pair_crossings) spread = std::max(spread, std::abs(c - top_crossing));
  double half_step = (grid[1] - grid[0]) / 2.0;
  est.uncertainty = std::max(spread, half_step);
  return est;
}

// Solves p_target = p_L(d_b) * r^(-(d - d_b)/2) with r = p_L(d_a)/p_L(d_b)
// for the code distance d (d_a = d_b - 2), rounding up to the next odd
// integer. Valid only on a decreasing pair a > b.
inline int extrapolate_distance(double p_L_a, double p_L_b, int d_b, double p_target) {
  if (!(p_L_b > 0.0) || !(p_L_a < 1.0) || p_L_a <= p_L_b)
    throw std::domain_error("extrapolation needs 0 < p_L(d-2) ... with p_L decreasing in d");
  if (!(p_target > 0.0)) throw std::domain_error("target rate must be positive");
  double d_real = d_b + 2.0 * std::log(p_L_b / p_target) / std::log(p_L_a / p_L_b);
  int d = static_cast<int>(std::ceil(d_real - 1e-9));
  if (d < 1) d = 1;
  if (d % 2 == 0) ++d;
  return d;
}

// Converts a measured dephasing threshold back to the tolerable per-photon
// loss: undo the N_rep majority vote, then invert the l = m dephasing law.
inline double threshold_to_loss(double p_z_th, int m, int N_rep) {
  if (m < 1) throw std::invalid_argument("segment count m must be >= 1");
  if (p_z_th == 0.0) return 0.0;
  if (!(p_z_th > 0.0) || !(p_z_th < 0.5))
    throw std::domain_error("threshold dephasing rate must lie in [0, 1/2)");
  double per_photon = invert_encoded_dephasing(p_z_th, N_rep);
  return invert_dephasing_rate(per_photon, m);
}

}  // namespace mtqc
