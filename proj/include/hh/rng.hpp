#pragma once
#include <cstdint>
#include <random>

namespace hh {

// Stateless 64-bit mixer; used to derive independent stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Per-trial seed from (base seed, sweep point index, trial index).
// Splittable counter scheme: every (sweep, trial) cell gets its own stream.
inline std::uint64_t trial_seed(std::uint64_t base, std::uint64_t sweep_index,
                                std::uint64_t trial_index) {
  return splitmix64(splitmix64(base + 0x9E3779B97F4A7C15ull * sweep_index) +
                    0xBF58476D1CE4E5B9ull * trial_index);
}

// Deterministic random stream. mt19937_64 output is pinned by the standard,
// so identical seeds give identical draws on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  // Uniform double in [0, 1), 53 random bits.
  double u01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return u01() < p; }

  // Uniform integer in [lo, hi], rejection sampled to avoid modulo bias.
  int uniform_int(int lo, int hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t v;
    do {
      v = eng_();
    } while (v >= limit);
    return lo + static_cast<int>(v % span);
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace hh
