#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>
#include <vector>

namespace exem {

// SplitMix64 finalizer. Used to derive well-separated stream seeds from a
// base seed plus tags (stage id, start node, replica index, ...).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Folds a list of tags into a single seed. Order-sensitive.
inline std::uint64_t mix_seed(std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = 0x8f1bbcdcbfa53e0bULL;
  for (std::uint64_t t : tags) h = splitmix64(h ^ t);
  return h;
}

// Deterministic random source. All draws are built from raw mt19937_64
// output (whose sequence the standard pins down) rather than the standard
// distribution templates, so results are identical across platforms and
// library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % n;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % n;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double next_range(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  // Fisher-Yates shuffle driven by next_below, for reproducible ordering.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace exem
