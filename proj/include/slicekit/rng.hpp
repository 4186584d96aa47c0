#pragma once

// Deterministic random streams. Every variate consumed by the samplers is
// produced here from explicit algorithms (inverse-CDF normal, Marsaglia-Tsang
// gamma), never from std::*_distribution, whose output is
// implementation-defined. Two runs with the same (seed, stream) produce the
// same sequence on any platform.

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "slicekit/special.hpp"

namespace slicekit {

inline std::uint64_t splitmix64(std::uint64_t& s) {
  s += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// xoshiro256++, seeded through splitmix64. `stream` selects a disjoint
// substream (per-chain seeds = base seed + chain index by contract).
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::uint64_t m = seed ^ (0x9e3779b97f4a7c15ull * (stream + 1));
    s_[0] = splitmix64(m);
    s_[1] = splitmix64(m);
    s_[2] = splitmix64(m);
    s_[3] = splitmix64(m);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // strictly inside (0,1): 53-bit mantissa shifted half a step off zero
  double uniform01() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  double normal() { return normal_quantile(uniform01()); }

  double exponential(double rate) { return -std::log(uniform01()) / rate; }

  // Marsaglia-Tsang; shape < 1 boosted via Gamma(shape+1) * U^(1/shape)
  double gamma(double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0)) throw std::invalid_argument("gamma: shape and rate must be positive");
    if (shape < 1.0) {
      const double u = uniform01();
      return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform01();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
    }
  }

  double inv_gamma(double shape, double scale) { return scale / gamma(shape, 1.0); }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

}  // namespace slicekit
