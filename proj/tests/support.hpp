#pragma once

// Shared test helpers: seeded random chain generators and independent
// closed-form oracles. The RNG is hand-rolled uniform over mt19937_64 so
// fixtures do not depend on the standard library's distributions.

#include <cstdint>
#include <random>
#include <vector>

#include "cap1d/core.hpp"

namespace testsupport {

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng{seed} {}

  double uniform(double a, double b) {
    return a + (b - a) * static_cast<double>(eng() >> 11) * 0x1.0p-53;
  }
  int uniform_int(int a, int b) {  // inclusive
    return a + static_cast<int>(eng() % static_cast<std::uint64_t>(b - a + 1));
  }
  cap1d::Complex complex_in(double re_lo, double re_hi, double im_lo, double im_hi) {
    return {uniform(re_lo, re_hi), uniform(im_lo, im_hi)};
  }
};

// Chain with the acceptance-suite distributions: N in [1,6], widths in
// [0.1, 2], heights real in [-10, 10] (or complex with the same bounds).
inline cap1d::BarrierChain random_chain(Rng& rng, bool complex_heights, double start = 0.0,
                                        int max_segments = 6) {
  const int n = rng.uniform_int(1, max_segments);
  cap1d::BarrierChain chain{start};
  for (int i = 0; i < n; ++i) {
    const double im = complex_heights ? rng.uniform(-10.0, 10.0) : 0.0;
    chain.append({rng.uniform(0.1, 2.0), cap1d::Complex{rng.uniform(-10.0, 10.0), im}});
  }
  return chain;
}

inline double random_k(Rng& rng) { return rng.uniform(0.5, 10.0); }

// Closed-form transmission probability of a single rectangular barrier,
// |T|^2 = [1 + V^2 sin^2(q d) / (4 E (E - V))]^{-1} with E = k^2,
// q = sqrt(E - V). Valid for real V != E; complex arithmetic covers E < V.
inline double rect_barrier_transmission(double v, double d, double k) {
  const double e = k * k;
  const cap1d::Complex q = std::sqrt(cap1d::Complex{e - v, 0.0});
  const cap1d::Complex s = std::sin(q * d);
  const cap1d::Complex inv = 1.0 + v * v * s * s / (4.0 * e * (e - v));
  return 1.0 / inv.real();
}

}  // namespace testsupport
