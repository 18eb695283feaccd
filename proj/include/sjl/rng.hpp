#pragma once

#include <cmath>
#include <cstdint>

// Counter-based random numbers. Every variate is a pure function of
// (seed, stream, index, lane), so draws may be issued in any order and
// from any thread while still agreeing bit for bit with a serial run.

namespace sjl::rng {

namespace detail {

// SplitMix64 finalizer (Steele, Lea, Flood 2014). Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;  // 2^64 / phi

}  // namespace detail

// Well-separated stream ids. One logical random object per stream; a
// collision between streams under the same seed would correlate them.
enum class Stream : std::uint64_t {
  entry_sample = 1,   // distribution::sample_entries
  matrix_mask = 2,    // Bernoulli(q_mask) thinning of projection entries
  matrix_value = 3,   // projection entry values
  data_value = 4,     // synthetic data coordinates
  data_support = 5,   // nonzero-position selection for sparse data
  power_start = 6,    // deterministic start vector for power iteration
  mc = 7,             // Monte Carlo harnesses (verify, experiments)
};

// Stateless generator: the key folds in seed and stream once, after that
// bits(index, lane) is three rounds of mixing.
class Counter {
 public:
  Counter(std::uint64_t seed, Stream stream)
      : key_(detail::mix64(detail::mix64(seed + detail::kGolden) ^
                           (static_cast<std::uint64_t>(stream) * 0xda942042e4dd58b5ULL))) {}

  std::uint64_t bits(std::uint64_t index, std::uint64_t lane = 0) const {
    std::uint64_t h = detail::mix64(key_ ^ (index + detail::kGolden));
    return detail::mix64(h ^ (lane * 0x2545f4914f6cdd1dULL + 1));
  }

  // Uniform on [0,1), 53 random bits.
  double u01(std::uint64_t index, std::uint64_t lane = 0) const {
    return static_cast<double>(bits(index, lane) >> 11) * 0x1.0p-53;
  }

  // Uniform on (0,1]; safe under log().
  double u01_open(std::uint64_t index, std::uint64_t lane = 0) const {
    return static_cast<double>((bits(index, lane) >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller, lanes (2*lane, 2*lane+1) of the index.
  // The sine twin is discarded so that a variate depends on its own index only.
  double normal(std::uint64_t index, std::uint64_t lane = 0) const {
    const double u1 = u01_open(index, 2 * lane);
    const double u2 = u01(index, 2 * lane + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(6.283185307179586476925286766559 * u2);
  }

 private:
  std::uint64_t key_;
};

// Derives a child seed, e.g. one per (grid point, trial). Collisions across
// distinct (tag, k) pairs are as unlikely as 64-bit hash collisions.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag, std::uint64_t k) {
  return detail::mix64(detail::mix64(seed ^ (tag + detail::kGolden)) + k * 0xda942042e4dd58b5ULL);
}

}  // namespace sjl::rng
