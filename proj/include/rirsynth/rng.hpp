#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace rirsynth {

// splitmix64 finalizer; bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}

// Derives an independent stream seed from a master seed and a tuple of
// indices (room index, constellation index, retry counter, ...). Parallel
// workers use this so that per-record output does not depend on scheduling.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = mix64(seed + 0x9e3779b97f4a7c15ull);
  for (std::uint64_t w : words) {
    h = mix64(h ^ (w + 0x9e3779b97f4a7c15ull));
  }
  return h;
}

// Seeded random stream with portable value mapping. The engine output is
// fixed by the standard; the uniform/normal mappings below are explicit so
// that generated datasets are reproducible byte-for-byte across platforms.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller. Stateless: two engine draws per value.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  // Uniform index in [0, n).
  std::size_t index(std::size_t n) {
    const auto k = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return k < n ? k : n - 1;
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace rirsynth
