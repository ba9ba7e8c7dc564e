#pragma once

#include <cstdint>
#include <initializer_list>

namespace scalex {

// SplitMix64 (Vigna's public-domain reference sequence: state += 0x9E3779B97F4A7C15,
// output = mix(state)). Chosen over std::mt19937 + std::uniform_real_distribution
// because the entire draw path below is integer/IEEE-exact, so streams are
// bit-identical across platforms and compilers.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on [low, high); degenerate near-empty intervals are fine.
  double next_uniform(double low, double high) { return low + next_unit() * (high - low); }

  // Rademacher sign from the top bit.
  int next_sign() { return (next_u64() >> 63) ? 1 : -1; }

 private:
  std::uint64_t state_;
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace detail

// Derives a stream seed from a base seed and a path of components (scenario id,
// N, trial index, ...), folding each component through the SplitMix64 mix.
// Independent of execution order, so parallel trials can derive their own streams.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = base;
  for (std::uint64_t p : path) {
    h = detail::mix64(h + 0x9E3779B97F4A7C15ULL + p);
  }
  return h;
}

}  // namespace scalex
