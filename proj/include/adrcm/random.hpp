#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace adrcm {

// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based seed derivation: the seed of item `index` in stream `stream`
// depends only on (master, stream, index), never on evaluation order.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                    std::uint64_t index) noexcept {
  return splitmix64(splitmix64(splitmix64(master) ^ stream) + index);
}

// FNV-1a, used to turn labels into stream identifiers and to hash configs.
constexpr std::uint64_t fnv1a64(std::string_view text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Deterministic random source. Uses mt19937_64 (its output sequence is fixed
// by the standard) and converts bits to reals without library distributions,
// whose algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1].
  double uniform_open_closed() { return 1.0 - uniform(); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, bound), bound > 0. Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t bound) {
    for (;;) {
      const std::uint64_t x = engine_();
      const unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
      const auto low = static_cast<std::uint64_t>(m);
      if (low >= bound || low >= (0 - bound) % bound) return static_cast<std::uint64_t>(m >> 64);
    }
  }

  double standard_normal() {
    // Marsaglia polar method; spare value discarded to keep the stream simple.
    for (;;) {
      const double a = 2.0 * uniform() - 1.0;
      const double b = 2.0 * uniform() - 1.0;
      const double s = a * a + b * b;
      if (s > 0.0 && s < 1.0) return a * std::sqrt(-2.0 * std::log(s) / s);
    }
  }

  // Poisson variate by sequential inversion. Large means are split into
  // chunks of at most kChunk, which is exact by additivity of the Poisson law.
  std::uint64_t poisson(double mean) {
    constexpr double kChunk = 16.0;
    std::uint64_t total = 0;
    while (mean > 0.0) {
      const double m = mean > kChunk ? kChunk : mean;
      mean -= m;
      total += poisson_inversion(m);
    }
    return total;
  }

 private:
  std::uint64_t poisson_inversion(double m) {
    const double u = uniform();
    double p = std::exp(-m);
    double cdf = p;
    std::uint64_t k = 0;
    // The cap only triggers when rounding leaves cdf short of u by ~1e-16.
    while (u >= cdf && k < 1000) {
      ++k;
      p *= m / static_cast<double>(k);
      cdf += p;
    }
    return k;
  }

  std::mt19937_64 engine_;
};

}  // namespace adrcm
