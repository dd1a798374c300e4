#pragma once

#include <cstdint>

namespace mtqc {

// Small, fast 64-bit generator (SplitMix64). It doubles as the hash that
// derives independent per-trial substreams, which keeps every Monte Carlo
// trial reproducible no matter how trials are scheduled across workers.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) using the top 53 bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t state_;
};

// Generator for trial `index` of a run seeded with `master`. The mapping is a
// pure function of (master, index): results never depend on which worker
// thread executes the trial or in what order trials complete.
inline SplitMix64 substream(std::uint64_t master, std::uint64_t index) {
  SplitMix64 mix(master ^ (0x9e3779b97f4a7c15ull * (index + 1)));
  std::uint64_t s = mix.next();
  SplitMix64 mix2(s + 0x2545f4914f6cdd1dull);
  return SplitMix64(mix2.next());
}

}  // namespace mtqc
