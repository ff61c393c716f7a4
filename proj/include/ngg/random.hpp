#pragma once

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>

namespace ngg {

/// Source of every stochastic decision made by the generators and the game.
///
/// Engine code never touches a raw bit generator; it asks for one of three
/// kinds of draw. This keeps results identical across standard libraries and
/// lets tests substitute a source that walks every branch of a round.
///
/// Degenerate draws (`bernoulli` with p <= 0 or p >= 1, `weighted_index` over
/// a single entry) are resolved without consuming randomness.
template <typename R>
concept RandomSource = requires(R& r, std::size_t n, double p, std::span<const double> w) {
  { r.uniform_index(n) } -> std::convertible_to<std::size_t>;
  { r.bernoulli(p) } -> std::convertible_to<bool>;
  { r.weighted_index(w) } -> std::convertible_to<std::size_t>;
};

/// 64-bit finalizer from SplitMix64:
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   z =  z ^ (z >> 31)
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// One SplitMix64 step: add the golden-ratio increment 0x9E3779B97F4A7C15, then mix64.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  return mix64(x + 0x9E3779B97F4A7C15ULL);
}

/// Portable random stream over std::mt19937_64.
///
/// The engine's output sequence is fixed by the standard; the distributions
/// below are written out here because the std:: ones are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Unbiased uniform integer in [0, n) by threshold rejection. n must be > 0.
  std::size_t uniform_index(std::size_t n) {
    const std::uint64_t bound = n;
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t x = engine_();
      if (x >= threshold) return static_cast<std::size_t>(x % bound);
    }
  }

  bool bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return uniform01() < p;
  }

  /// Index i drawn with probability weights[i] / sum(weights).
  std::size_t weighted_index(std::span<const double> weights) {
    if (weights.size() == 1) return 0;
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    const double u = uniform01() * total;
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] <= 0.0) continue;
      acc += weights[i];
      last_positive = i;
      if (u < acc) return i;
    }
    return last_positive;
  }

 private:
  std::mt19937_64 engine_;
};

static_assert(RandomSource<Rng>);

}  // namespace ngg
