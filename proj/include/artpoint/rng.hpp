#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace artpoint {

// Deterministic random source. mt19937_64 is fully specified by the standard
// and the distribution mappings below are hand-rolled, so identical seeds give
// identical streams on every platform (std::uniform_real_distribution et al.
// are implementation-defined and would not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Unbiased integer in [0, n), n >= 1, via rejection.
  std::uint64_t uniform_index(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = next();
    while (v >= limit) v = next();
    return v % n;
  }

  // Box-Muller; consumes exactly two draws per call (no cached spare).
  double normal(double mean, double stddev) {
    double u1 = uniform01();
    double u2 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    return mean + stddev * r * std::cos(theta);
  }

 private:
  std::mt19937_64 engine_;
};

// splitmix64 finalizer; good avalanche for seed derivation.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent stream seed from (base, stream, index). Used to give
// every sample / model / phase its own generator so parallel and serial runs
// produce identical results.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream,
                                 std::uint64_t index = 0) {
  return mix64(mix64(base ^ 0x6a09e667f3bcc909ULL) ^ mix64(stream) ^
               mix64(index ^ 0xbb67ae8584caa73bULL));
}

}  // namespace artpoint
