#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace grc {

// SplitMix64: small, fast, and identical on every platform. Used directly
// for shuffles and samples, and to derive independent per-level seeds from
// one root seed. We deliberately avoid std::shuffle and the std::*_distribution
// classes because their output is implementation-defined.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53 bits of mantissa.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double next_double(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Uniform integer in [0, bound), bound > 0. Rejection sampling keeps the
  // distribution exact without depending on library internals.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % bound;
  }

 private:
  std::uint64_t state_;
};

// Seed for coarsening level `level` of a run rooted at `root`: decorrelated
// streams per level, reproducible from the root seed alone.
inline std::uint64_t level_seed(std::uint64_t root, int level) {
  SplitMix64 rng(root ^ (0x632be59bd9b4e019ULL * static_cast<std::uint64_t>(level + 1)));
  return rng.next();
}

// Fisher-Yates, spelled out so the result is a function of the seed only.
template <typename T>
void deterministic_shuffle(std::vector<T>& v, SplitMix64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    std::swap(v[i - 1], v[j]);
  }
}

inline std::vector<int> random_permutation(int n, SplitMix64& rng) {
  std::vector<int> p(n);
  for (int i = 0; i < n; ++i) p[i] = i;
  deterministic_shuffle(p, rng);
  return p;
}

}  // namespace grc
