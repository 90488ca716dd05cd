#ifndef BNCAUSAL_RNG_HPP_
#define BNCAUSAL_RNG_HPP_

#include <cstdint>
#include <random>

namespace bncausal {

// Finalizer of splitmix64 (Steele, Lea, Flood 2014). Used both as a seed
// scrambler and as the documented per-run seed derivation: two different
// inputs give decorrelated outputs, so disjoint run indices yield
// statistically independent streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed for Monte Carlo run `run_index` under `master_seed`.
inline std::uint64_t derive_run_seed(std::uint64_t master_seed,
                                     std::uint64_t run_index) {
  return splitmix64(master_seed ^ splitmix64(run_index + 1));
}

// mt19937_64 is fully specified by the standard, so identical seeds give
// identical streams on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  // Uniform double in [0, 1) with 53 random bits. Hand-rolled because the
  // distribution adapters in <random> are implementation-defined.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Value in [0, k) distributed by the probability row `probs` (length k).
  // Rows are normalized by construction; any residual mass goes to the
  // last category.
  int categorical(const double* probs, int k) {
    const double u = uniform();
    double cum = 0.0;
    for (int v = 0; v + 1 < k; ++v) {
      cum += probs[v];
      if (u < cum) return v;
    }
    return k - 1;
  }

  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace bncausal

#endif  // BNCAUSAL_RNG_HPP_
