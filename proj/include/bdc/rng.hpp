#pragma once
// Deterministic random source. Reruns must be byte-identical across
// platforms and standard libraries, so we avoid std::shuffle and the
// std <random> distributions (both implementation-defined) and build on
// splitmix64 with rejection-sampled bounded draws.

#include <cstdint>
#include <initializer_list>
#include <string_view>
#include <vector>

namespace bdc {

// One mixing step of splitmix64, usable as a standalone 64-bit hash.
inline std::uint64_t splitmix64_mix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [0, bound). Rejection sampling keeps the draw unbiased.
  std::uint64_t next_below(std::uint64_t bound) {
    // 2^64 mod bound, computed without 128-bit arithmetic
    std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  bool bernoulli(double p) { return next_double() < p; }

 private:
  std::uint64_t state_;
};

// Stable child-seed derivation: mixes each path component into the base.
// Used to hand independent streams to (trial, model, arm) cells without
// coupling their draw counts.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = splitmix64_mix(base);
  for (std::uint64_t x : path) s = splitmix64_mix(s ^ splitmix64_mix(x));
  return s;
}

// Fisher-Yates. Identity permutation is possible; callers that need a
// changed order must check, not assume.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    using std::swap;
    swap(v[i - 1], v[j]);
  }
}

inline std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  shuffle(p, rng);
  return p;
}

}  // namespace bdc
