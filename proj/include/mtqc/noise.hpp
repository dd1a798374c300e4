#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

// Closed-form noise and threshold-conversion formulas for the multiphoton
// measurement-based architecture: photon loss -> dephasing, n-photon Bell
// measurement (n-BSM) failure, loss-budget composition, repetition-code
// suppression, and the qubit-removal probabilities of the two protocol
// variants (MTQC-1 teleports every lattice qubit through a star cluster;
// MTQC-2 keeps the central qubit in place).

namespace mtqc {

enum class Variant { mtqc1, mtqc2 };

inline const char* variant_name(Variant v) {
  return v == Variant::mtqc1 ? "mtqc1" : "mtqc2";
}

// Fraction of lattice-qubit removals that makes an x-spanning loss cluster
// unavoidable; used as the viability bound for MTQC-1.
inline constexpr double kRemovalBound = 0.249;
// Largest tolerable n-BSM failure rate for MTQC-2's missing-edge pattern.
inline constexpr double kMtqc2FailureBound = 0.145;

struct NoiseParams {
  double eta = 0.0;  // photon-loss rate per photon, [0, 1)
  int n = 8;         // photons per star-cluster side qubit
  int m = 2;         // photons per central / lattice qubit
  int N_rep = 1;     // repetition blocks per lattice qubit (odd; 1 = unencoded)
  Variant variant = Variant::mtqc2;
  // Alternative MTQC-2 removal model: each of the four exposures fires at
  // p_f/2 instead of p_f (see qubit_survival).
  bool mtqc2_half_rate_removal = false;

  void validate() const {
    if (!(eta >= 0.0 && eta < 1.0)) throw std::invalid_argument("eta must be in [0, 1)");
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (m < 1) throw std::invalid_argument("m must be >= 1");
    if (N_rep < 1 || N_rep % 2 == 0)
      throw std::invalid_argument("N_rep must be odd and >= 1");
  }
};

// Probability that a qubit made of l photons suffers an unheralded phase flip
// when each photon is lost with probability eta: (1 - (1-eta)^l) / 2.
inline double dephasing_rate(double eta, int l) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::domain_error("eta must be in [0, 1]");
  if (l < 1) throw std::domain_error("photon count must be >= 1");
  return (1.0 - std::pow(1.0 - eta, l)) / 2.0;
}

// Inverse of dephasing_rate in eta: the loss rate at which an l-photon qubit
// dephases with probability p.
inline double invert_dephasing_rate(double p, int l) {
  if (!(p >= 0.0 && p < 0.5)) throw std::domain_error("dephasing rate must be in [0, 1/2)");
  if (l < 1) throw std::domain_error("photon count must be >= 1");
  return 1.0 - std::pow(1.0 - 2.0 * p, 1.0 / l);
}

// Failure rate of an n-BSM when each photon survives with probability 1-eta
// and each two-photon Bell measurement succeeds with probability (1-eta)^2/2:
// [1 - (1-eta)^2/2]^n.
inline double nbsm_failure_rate(double eta, int n) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::domain_error("eta must be in [0, 1]");
  if (n < 1) throw std::domain_error("n must be >= 1");
  double per_bs_fail = 1.0 - (1.0 - eta) * (1.0 - eta) / 2.0;
  return std::pow(per_bs_fail, n);
}

// First-order-in-eta form (1/2 + eta)^n of the same failure rate. Kept as a
// documented helper because several reference figures were evidently computed
// with it; all primary code paths use the exact form above.
inline double nbsm_failure_rate_small_eta(double eta, int n) {
  if (!(eta >= 0.0 && eta <= 0.5)) throw std::domain_error("eta must be in [0, 1/2]");
  if (n < 1) throw std::domain_error("n must be >= 1");
  return std::pow(0.5 + eta, n);
}

// ---------------------------------------------------------------------------
// Loss budget: the overall per-photon loss rate is composed from a source,
// delay-line, switch-network and detector contribution.

struct LossBudget {
  double eta_soc = 0.0;  // source & outcoupling
  double eta_dly = 0.0;  // delay line (fiber storage during kappa time steps)
  double eta_swc = 0.0;  // switch network
  double eta_det = 0.0;  // detector
  double eta_s = 0.0;    // loss per switch; eta_swc = 1 - (1-eta_s)^kappa
  int kappa = 0;         // time steps a lattice-qubit photon waits
  double c = 2.0e5;      // signal speed in fiber, km/s
  double tau0 = 150e-9;  // duration of one Bell-measurement time step, s
  double L0 = 22.0;      // fiber attenuation length, km
};

// Loss accumulated while a photon idles in fiber for kappa time steps of
// length tau0: 1 - exp(-c * tau0 * kappa / L0).
inline double delay_line_loss(int kappa, double c = 2.0e5, double tau0 = 150e-9,
                              double L0 = 22.0) {
  if (kappa < 0) throw std::domain_error("kappa must be >= 0");
  if (!(c > 0.0) || !(tau0 >= 0.0) || !(L0 > 0.0))
    throw std::domain_error("fiber parameters must be positive");
  return 1.0 - std::exp(-c * tau0 * static_cast<double>(kappa) / L0);
}

// Loss of a photon routed through kappa switches, each lossy at eta_s.
inline double switch_network_loss(double eta_s, int kappa) {
  if (!(eta_s >= 0.0 && eta_s < 1.0)) throw std::domain_error("eta_s must be in [0, 1)");
  if (kappa < 0) throw std::domain_error("kappa must be >= 0");
  return 1.0 - std::pow(1.0 - eta_s, kappa);
}

// Overall loss rate: 1 - (1-soc)(1-dly)(1-swc)(1-det).
inline double compose_loss(const LossBudget& b) {
  for (double r : {b.eta_soc, b.eta_dly, b.eta_swc, b.eta_det})
    if (!(r >= 0.0 && r < 1.0)) throw std::domain_error("component rates must be in [0, 1)");
  return 1.0 - (1.0 - b.eta_soc) * (1.0 - b.eta_dly) * (1.0 - b.eta_swc) * (1.0 - b.eta_det);
}

// Budget with the delay-line loss fixed by kappa and the remaining allowance
// split equally between source, switch network and detector so that the
// composition reproduces eta_total. Also reports the per-switch loss eta_s
// consistent with the switch-network share.
inline LossBudget balanced_budget(double eta_total, int kappa, double c = 2.0e5,
                                  double tau0 = 150e-9, double L0 = 22.0) {
  if (!(eta_total >= 0.0 && eta_total < 1.0))
    throw std::domain_error("eta_total must be in [0, 1)");
  LossBudget b;
  b.kappa = kappa;
  b.c = c;
  b.tau0 = tau0;
  b.L0 = L0;
  b.eta_dly = delay_line_loss(kappa, c, tau0, L0);
  double keep = (1.0 - eta_total) / (1.0 - b.eta_dly);
  if (keep > 1.0)
    throw std::domain_error("delay-line loss alone exceeds the loss budget");
  double component = 1.0 - std::cbrt(keep);
  b.eta_soc = b.eta_swc = b.eta_det = component;
  b.eta_s = kappa > 0 ? 1.0 - std::pow(1.0 - component, 1.0 / kappa) : 0.0;
  return b;
}

// ---------------------------------------------------------------------------
// Repetition code (majority vote over N_rep odd blocks).

// Probability that majority voting over N i.i.d. blocks with flip rate p
// yields a flipped result: sum_{q=(N+1)/2}^{N} C(N,q) p^q (1-p)^(N-q).
// Exact extended-precision summation for N <= 64, log-space accumulation
// above (avoids overflow in the binomial coefficients).
inline double encoded_dephasing(double p, int N) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("p must be in [0, 1]");
  if (N < 1 || N % 2 == 0) throw std::invalid_argument("N_rep must be odd and >= 1");
  if (N == 1) return p;
  int k0 = (N + 1) / 2;
  if (N <= 64) {
    long double q = 1.0L - static_cast<long double>(p);
    long double pl = static_cast<long double>(p);
    // C(N,k) built incrementally from C(N,k0).
    long double coeff = 1.0L;
    for (int i = 0; i < k0; ++i) coeff = coeff * static_cast<long double>(N - i) / static_cast<long double>(i + 1);
    long double acc = 0.0L;
    long double term_p = std::pow(pl, k0);
    long double term_q = std::pow(q, N - k0);
    for (int k = k0; k <= N; ++k) {
      acc += coeff * term_p * term_q;
      if (k < N) {
        coeff = coeff * static_cast<long double>(N - k) / static_cast<long double>(k + 1);
        term_p *= pl;
        if (q > 0.0L) term_q /= q; else term_q = (N - k - 1 == 0) ? 1.0L : 0.0L;
      }
    }
    if (acc < 0.0L) acc = 0.0L;
    if (acc > 1.0L) acc = 1.0L;
    return static_cast<double>(acc);
  }
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  // log-sum-exp over the tail
  double log_p = std::log(p), log_q = std::log1p(-p);
  double max_log = -HUGE_VAL;
  std::vector<double> logs;
  logs.reserve(N - k0 + 1);
  for (int k = k0; k <= N; ++k) {
    double lg = std::lgamma(N + 1.0) - std::lgamma(k + 1.0) - std::lgamma(N - k + 1.0) +
                k * log_p + (N - k) * log_q;
    logs.push_back(lg);
    max_log = std::max(max_log, lg);
  }
  double acc = 0.0;
  for (double lg : logs) acc += std::exp(lg - max_log);
  double out = std::exp(max_log) * acc;
  return std::min(1.0, std::max(0.0, out));
}

// Unique p in [0, 1/2] with encoded_dephasing(p, N) == p_target, by bisection
// (the tail is strictly increasing on [0, 1/2]).
inline double invert_encoded_dephasing(double p_target, int N) {
  if (!(p_target >= 0.0 && p_target <= 0.5))
    throw std::domain_error("target dephasing rate must be in [0, 1/2]");
  if (N < 1 || N % 2 == 0) throw std::invalid_argument("N_rep must be odd and >= 1");
  if (p_target == 0.0) return 0.0;
  double lo = 0.0, hi = 0.5;
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    double mid = 0.5 * (lo + hi);
    if (encoded_dephasing(mid, N) < p_target) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Principal-branch Lambert W for x > 0: the w with w e^w = x. Newton
// iteration; initialized with ln x - ln ln x for large arguments and with
// log1p(x) otherwise. Relative tolerance 1e-10 (typically far better).
inline double lambert_w(double x) {
  if (!(x > 0.0)) throw std::domain_error("lambert_w requires x > 0");
  const double e = 2.718281828459045;
  double w = (x >= e) ? std::log(x) - std::log(std::log(x)) : std::log1p(x);
  for (int it = 0; it < 100; ++it) {
    double ew = std::exp(w);
    double f = w * ew - x;
    double step = f / (ew * (w + 1.0));
    w -= step;
    if (std::abs(step) <= 1e-10 * (1.0 + std::abs(w))) break;
  }
  return w;
}

// Closed-form estimate of the tolerable loss rate for an N-block repetition
// code over m-photon qubits at target dephasing p:
//   eta ~= 1 - [1 + N / W(1/(2 pi p^2))]^(-1/(2m)).
// Derived from the Gaussian approximation of the majority-vote tail; the
// exact alternative is invert_encoded_dephasing followed by
// invert_dephasing_rate.
inline double lambert_threshold_approx(double p_target, int N, int m) {
  if (!(p_target > 0.0 && p_target < 0.5))
    throw std::domain_error("target dephasing rate must be in (0, 1/2)");
  if (N < 1) throw std::domain_error("N_rep must be >= 1");
  if (m < 1) throw std::domain_error("m must be >= 1");
  const double pi = 3.141592653589793;
  double w = lambert_w(1.0 / (2.0 * pi * p_target * p_target));
  return 1.0 - std::pow(1.0 + static_cast<double>(N) / w, -1.0 / (2.0 * m));
}

// ---------------------------------------------------------------------------
// Qubit removal. A lattice qubit is removed when any of the Bell-measurement
// exposures that stitch it into the lattice fails.

// Probability that a lattice qubit survives all its exposures given n-BSM
// failure rate p_f. MTQC-1 teleports the qubit through a star cluster and is
// exposed four times at p_f (diagonal edges) and four times at p_f/2 (missing
// edges); MTQC-2 keeps the central qubit and is exposed four times at p_f.
// The alternative MTQC-2 model (half_rate = true) uses p_f/2 for those four
// exposures instead.
inline double qubit_survival(double p_f, Variant v, bool mtqc2_half_rate = false) {
  if (!(p_f >= 0.0 && p_f <= 1.0)) throw std::domain_error("p_f must be in [0, 1]");
  if (v == Variant::mtqc1)
    return std::pow(1.0 - p_f, 4) * std::pow(1.0 - p_f / 2.0, 4);
  return mtqc2_half_rate ? std::pow(1.0 - p_f / 2.0, 4) : std::pow(1.0 - p_f, 4);
}

// The independent per-mechanism failure probabilities whose joint survival
// equals qubit_survival. Used by the sampler so each mechanism is drawn
// separately.
inline std::vector<double> removal_mechanisms(double p_f, Variant v,
                                              bool mtqc2_half_rate = false) {
  if (!(p_f >= 0.0 && p_f <= 1.0)) throw std::domain_error("p_f must be in [0, 1]");
  if (v == Variant::mtqc1)
    return {p_f, p_f, p_f, p_f, p_f / 2.0, p_f / 2.0, p_f / 2.0, p_f / 2.0};
  double q = mtqc2_half_rate ? p_f / 2.0 : p_f;
  return {q, q, q, q};
}

inline double removal_probability(double p_f, Variant v, bool mtqc2_half_rate = false) {
  return 1.0 - qubit_survival(p_f, v, mtqc2_half_rate);
}

// Root of 1 - qubit_survival(p_f) = kRemovalBound: the n-BSM failure rate at
// which lattice-qubit losses reach the percolation bound (bisection; the
// removal probability is strictly increasing in p_f).
inline double survival_loss_bound_root(Variant v = Variant::mtqc1,
                                       bool mtqc2_half_rate = false) {
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    double mid = 0.5 * (lo + hi);
    if (removal_probability(mid, v, mtqc2_half_rate) < kRemovalBound) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Smallest n for which the protocol is viable at loss rate eta: MTQC-1 needs
// the removal probability below kRemovalBound, MTQC-2 needs the n-BSM failure
// rate below kMtqc2FailureBound. The search stops at n_max (the enumeration
// scale of the optics checks); nullopt means no viable n was found below the
// cap. Note the exact failure rate approaches [1-(1-eta)^2/2]^n rather than 1
// as eta -> 1/2, so very large n could eventually satisfy the bounds; raise
// n_max to explore that regime.
inline std::optional<int> min_n_for_variant(double eta, Variant v, int n_max = 12) {
  if (!(eta >= 0.0 && eta < 1.0)) throw std::domain_error("eta must be in [0, 1)");
  for (int n = 1; n <= n_max; ++n) {
    double p_f = nbsm_failure_rate(eta, n);
    bool ok = (v == Variant::mtqc1) ? removal_probability(p_f, v) < kRemovalBound
                                    : p_f < kMtqc2FailureBound;
    if (ok) return n;
  }
  return std::nullopt;
}

}  // namespace mtqc
