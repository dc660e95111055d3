#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

namespace ranklab {

// Mixes a 64-bit state into a well-distributed value (splitmix64 finalizer).
inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic random stream. All draws are defined directly on top of the
// mt19937_64 output so results are identical across platforms and standard
// library implementations (std::uniform_real_distribution et al. are not
// portable).
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(mix64(seed)) {}

  // Independent stream derived from a master seed and a stream index.
  // Used to make parallel work (e.g. one stream per session) bit-identical
  // regardless of scheduling.
  static Rng for_stream(uint64_t master_seed, uint64_t stream_index) {
    return Rng(mix64(master_seed) ^ mix64(stream_index * 0x9e3779b97f4a7c15ULL + 0x1234567));
  }

  uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1]; never returns exactly zero.
  double uniform_pos() { return 1.0 - uniform(); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, n), unbiased via rejection.
  uint64_t uniform_int(uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_int: n must be positive");
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // Standard normal via Box-Muller (no caching, so the draw sequence is a
  // fixed function of the call sequence).
  double normal() {
    double u1 = uniform_pos();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  // Index sampled from a distribution given as cumulative weights
  // (non-decreasing, last element is the total mass).
  size_t categorical(std::span<const double> cumulative) {
    if (cumulative.empty()) throw std::invalid_argument("categorical: empty distribution");
    const double total = cumulative.back();
    const double x = uniform() * total;
    size_t lo = 0, hi = cumulative.size() - 1;
    while (lo < hi) {
      size_t mid = (lo + hi) / 2;
      if (cumulative[mid] <= x)
        lo = mid + 1;
      else
        hi = mid;
    }
    return lo;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ranklab
