#pragma once

#include <cstdint>
#include <random>

namespace elqkd {

/// SplitMix64 finalizer. Used only to derive seeds, never to draw samples.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Seed of child stream `stream` of a generator seeded with `seed`:
/// splitmix64(seed ^ splitmix64(stream)). Distinct streams of one seed, and
/// the same stream of distinct seeds, get decorrelated engine states.
constexpr std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return splitmix64(seed ^ splitmix64(stream));
}

/// Seedable, splittable generator over std::mt19937_64. Satisfies
/// UniformRandomBitGenerator so it can drive <random> distributions.
class SeededRng {
 public:
  using engine_type = std::mt19937_64;
  using result_type = engine_type::result_type;

  explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  /// Independent child generator; depends only on (seed(), stream).
  SeededRng split(std::uint64_t stream) const {
    return SeededRng{derive_stream_seed(seed_, stream)};
  }

  std::uint64_t seed() const noexcept { return seed_; }

  static constexpr result_type min() { return engine_type::min(); }
  static constexpr result_type max() { return engine_type::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool coin() { return (engine_() >> 63) != 0; }
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t seed_;
  engine_type engine_;
};

}  // namespace elqkd
