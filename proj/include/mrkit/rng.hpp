#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace mrkit {

// Deterministic random machinery shared by sampling and augmentation.
//
// Reproducibility across platforms and schedules is part of the toolkit's
// contract, so nothing here delegates to <random> distributions (their
// algorithms are implementation-defined). The generator is splitmix64 and
// every draw below is specified exactly:
//
//   splitmix64 step:  s += 0x9E3779B97F4A7C15
//                     z = s
//                     z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//                     z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//                     return z ^ (z >> 31)
//
//   fnv1a64(bytes):   h = 0xCBF29CE484222325
//                     per byte: h ^= byte; h *= 0x100000001B3
//
//   mix(a, b):        splitmix64_scramble(a + 0x9E3779B97F4A7C15 +
//                     splitmix64_scramble(b)); order-sensitive, more parts
//                     fold left, mix(a, b, c) = mix(mix(a, b), c). Seeding a
//                     stream from (seed, key) or (seed, epoch, key) this way
//                     keeps each stream independent: perturbing one key
//                     never shifts another stream's draws.
//
//   below(n):         rejection sampling on the top of the 64-bit range,
//                     then modulo; unbiased for any n >= 1.

inline std::uint64_t splitmix64_scramble(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~0ULL; }

  result_type operator()() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return splitmix64_scramble(state_);
  }

  // Uniform draw in [0, n). Rejection keeps it unbiased.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = (*this)();
      if (r >= threshold) return r % n;
    }
  }

  // Partial Fisher-Yates: the first k slots of a shuffled copy of
  // [0, n). Draw order is fixed, so results are schedule-independent.
  std::vector<std::size_t> choose(std::size_t n, std::size_t k) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    if (k > n) k = n;
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(below(n - i));
      std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
  }

 private:
  std::uint64_t state_;
};

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t part) {
  return splitmix64_scramble(seed + 0x9E3779B97F4A7C15ULL +
                             splitmix64_scramble(part));
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a,
                              std::uint64_t b) {
  return mix_seed(mix_seed(seed, a), b);
}

}  // namespace mrkit
