#pragma once

// Multiple-scattering composition of the amplitudes of two contiguous
// potential units, and the back-solve for the reflection amplitude the next
// unit must realize. The geometric series over internal reflections is
// always summed in closed form.

#include <cmath>
#include <complex>

#include "cap1d/core.hpp"

namespace cap1d {

inline constexpr double kComposeDenominatorFloor = 1e-14;

// Amplitudes of the compound region formed by unit 1 (left) and unit 2
// (right), both given in the global frame at the same wavenumber:
//   t^l = t1^l t2^l / (1 - r2^l r1^r)
//   r^l = r1^l + t1^l r2^l t1^r / (1 - r2^l r1^r)
// and the mirror-symmetric right-incidence analogues.
inline ScatteringAmplitudes compose_amplitudes(const ScatteringAmplitudes& a1,
                                               const ScatteringAmplitudes& a2) {
  if (a1.k.value() != a2.k.value()) {
    throw std::invalid_argument("compose_amplitudes: wavenumber mismatch");
  }
  const Complex den = 1.0 - a2.r_left * a1.r_right;
  if (std::abs(den) <= kComposeDenominatorFloor) {
    throw ResonanceDenominator("compose_amplitudes: |1 - r2^l r1^r| below threshold");
  }
  ScatteringAmplitudes out{a1.k};
  out.t_left = a1.t_left * a2.t_left / den;
  out.r_left = a1.r_left + a1.t_left * a2.r_left * a1.t_right / den;
  out.t_right = a2.t_right * a1.t_right / den;
  out.r_right = a2.r_right + a2.t_right * a1.r_right * a2.t_left / den;
  return out;
}

// Reflection amplitude the second unit must have (together with t2^l = 0)
// for the compound region to absorb perfectly at this wavenumber:
//   r2^l = r1^l / (r1^l r1^r - t1^l t1^r).
inline Complex required_r2(const ScatteringAmplitudes& a1) {
  const Complex den = a1.r_left * a1.r_right - a1.t_left * a1.t_right;
  if (std::abs(den) <= kComposeDenominatorFloor) {
    throw DegenerateBacksolve("required_r2: back-solve denominator below threshold");
  }
  return a1.r_left / den;
}

}  // namespace cap1d
