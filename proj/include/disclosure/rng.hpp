#pragma once

// Small self-contained RNG used everywhere reproducibility matters. The
// standard distributions are implementation-defined, so simulated datasets
// and multi-start solvers draw through these helpers instead.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace disclosure {

// splitmix64 output finalizer; also used to derive independent stream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// splitmix64: full-period counter with a strong finalizer.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix64(state_);
  }

  // uniform on [0, 1)
  double uniform() { return double(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  // index in [0, n)
  std::size_t index(std::size_t n) { return std::size_t(uniform() * double(n)) % n; }

  // standard normal via Box-Muller (fresh pair each call, second value
  // dropped so the draw count per event is fixed)
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

 private:
  std::uint64_t state_;
};

}  // namespace disclosure
