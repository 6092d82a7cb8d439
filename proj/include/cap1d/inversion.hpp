#pragma once

// Composite potentials that absorb perfectly at a list of chosen
// wavenumbers, built by recursive polynomial inversion.
//
// Each unit prescribes an interior wavefunction Psi(y) on the scaled
// coordinate y = (x - z)/L with local wavenumber khat = L k. The y = 0
// conditions match an incident-plus-reflected wave (the reflection the unit
// must realize), the y = 1 conditions kill value and derivative so nothing
// is transmitted. Solving the stationary equation for the potential gives
// V(x) = k^2 + Psi''(y) / (L^2 Psi(y)), which diverges where Psi -> 0; the
// truncation policy clamps those excursions.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "cap1d/compose.hpp"
#include "cap1d/core.hpp"
#include "cap1d/transfer.hpp"

namespace cap1d {

// Cap mode clamps |Re V| and |Im V| pointwise. The optional target mode
// additionally trims the first unit near its right edge until the unit's
// own survival at its design wavenumber rises to target_survival.
struct TruncationPolicy {
  double cap = 1e3;
  std::optional<double> target_survival{};

  void validate() const {
    if (!(cap > 0.0) || !std::isfinite(cap)) {
      throw std::invalid_argument("TruncationPolicy: cap must be positive");
    }
    if (target_survival && !(*target_survival > 0.0 && *target_survival < 1.0)) {
      throw std::invalid_argument("TruncationPolicy: target_survival must lie in (0, 1)");
    }
  }
};

// One polynomial-designed unit. Coefficients are in the scaled variable y;
// length 4 for cubic units, 3 for the wall-terminated quadratic variant.
struct InversionUnit {
  Wavenumber design_k;
  double z;
  double length;
  std::vector<Complex> coefficients;
  Complex r_target;  // local-frame reflection realized at the design khat; 0 for the first unit

  double khat() const noexcept { return length * design_k.value(); }

  Complex psi(double y) const {
    Complex v{0.0};
    for (std::size_t j = coefficients.size(); j-- > 0;) v = v * y + coefficients[j];
    return v;
  }

  Complex psi_second(double y) const {
    Complex v{0.0};
    for (std::size_t j = coefficients.size(); j-- > 2;) {
      v = v * y + static_cast<double>(j * (j - 1)) * coefficients[j];
    }
    return v;
  }

  // Unclamped potential at a point of the support.
  Complex potential_raw(double x) const {
    const double y = (x - z) / length;
    const double k = design_k.value();
    return k * k + psi_second(y) / (length * length * psi(y));
  }
};

namespace detail {

inline InversionUnit make_cubic_unit(Complex r_local, double z, double length, Wavenumber k) {
  if (!(length > 0.0)) throw std::invalid_argument("inversion unit: length must be positive");
  const double khat = length * k.value();
  const Complex b0 = 1.0 + r_local;
  const Complex b1 = iunit * khat * (1.0 - r_local);
  const Complex b2 = -(3.0 + 2.0 * iunit * khat) - r_local * (3.0 - 2.0 * iunit * khat);
  const Complex b3 = (2.0 + iunit * khat) + r_local * (2.0 - iunit * khat);
  return {k, z, length, {b0, b1, b2, b3}, r_local};
}

inline InversionUnit make_quadratic_unit(Complex r_local, double z, double length, Wavenumber k) {
  if (!(length > 0.0)) throw std::invalid_argument("inversion unit: length must be positive");
  const double khat = length * k.value();
  const Complex b0 = 1.0 + r_local;
  const Complex b1 = iunit * khat * (1.0 - r_local);
  const Complex b2 = -(b0 + b1);
  return {k, z, length, {b0, b1, b2}, r_local};
}

inline Complex local_reflection(const ScatteringAmplitudes& composite, double z) {
  const Complex r_global = required_r2(composite);
  return r_global * std::exp(Complex{0.0, -2.0 * composite.k.value() * z});
}

}  // namespace detail

// First unit on (0, 1): coefficients a0 = 1, a1 = i k1, a2 = -3 - 2 i k1,
// a3 = 2 + i k1.
inline InversionUnit build_first_unit(Wavenumber k1) {
  return detail::make_cubic_unit(Complex{0.0}, 0.0, 1.0, k1);
}

// Next cubic unit on [z, z+L], given the amplitudes (at k_new) of the
// composite occupying [0, z]. Back-solves the required global reflection,
// converts it to the unit-local frame with the e^{-2 i k z} phase, and
// applies the four boundary conditions.
inline InversionUnit build_next_unit(const ScatteringAmplitudes& composite_amps, double z,
                                     double length, Wavenumber k_new) {
  if (composite_amps.k.value() != k_new.value()) {
    throw std::invalid_argument("build_next_unit: amplitudes not evaluated at k_new");
  }
  return detail::make_cubic_unit(detail::local_reflection(composite_amps, z), z, length, k_new);
}

// Quadratic variant for a unit backed by a hard wall at x = z + L; the
// derivative condition at y = 1 is dropped.
inline InversionUnit build_wall_unit(const ScatteringAmplitudes& composite_amps, double z,
                                     double length, Wavenumber k_new) {
  if (composite_amps.k.value() != k_new.value()) {
    throw std::invalid_argument("build_wall_unit: amplitudes not evaluated at k_new");
  }
  return detail::make_quadratic_unit(detail::local_reflection(composite_amps, z), z, length, k_new);
}

namespace detail {

inline double clamp_part(double v, double cap) {
  if (std::isnan(v)) return cap;  // exact zero of Psi under a sample point
  return std::clamp(v, -cap, cap);
}

}  // namespace detail

// Uniform sampling of V(x) = k^2 + Psi''/(L^2 Psi) over the support, with
// Re and Im independently clamped to +-policy.cap. Samples landing on a
// zero of Psi come out capped; that is the defined behavior, not an error.
inline SampledPotential sample_unit(const InversionUnit& unit, std::size_t samples,
                                    const TruncationPolicy& policy) {
  if (samples < 2) throw std::invalid_argument("sample_unit: need at least 2 samples");
  policy.validate();
  std::vector<Complex> values(samples);
  const double k = unit.design_k.value();
  const double l2 = unit.length * unit.length;
  for (std::size_t j = 0; j < samples; ++j) {
    const double y = static_cast<double>(j) / static_cast<double>(samples - 1);
    const Complex raw = k * k + unit.psi_second(y) / (l2 * unit.psi(y));
    values[j] = {detail::clamp_part(raw.real(), policy.cap),
                 detail::clamp_part(raw.imag(), policy.cap)};
  }
  return {unit.z, unit.length, std::move(values)};
}

namespace detail {

inline double unit_survival(const SampledPotential& sampled, std::size_t slices, Wavenumber k,
                            bool wall) {
  const BarrierChain chain = discretize(sampled, slices);
  if (wall) return std::norm(reflect_with_wall(chain, k));
  return survival(amplitudes(chain, k));
}

// Zeroes samples from index `cut` on. Trimming away more of the divergent
// right edge raises the unit's survival at its design k; bisection finds the
// least trim whose survival reaches the target.
inline SampledPotential trim_to_target(const SampledPotential& sampled, const InversionUnit& unit,
                                       std::size_t slices, double target, bool wall) {
  const auto survival_with_cut = [&](std::size_t cut) {
    std::vector<Complex> v = sampled.values();
    for (std::size_t j = cut; j < v.size(); ++j) v[j] = Complex{0.0};
    return unit_survival(sampled.with_values(std::move(v)), slices, unit.design_k, wall);
  };
  const std::size_t n = sampled.size();
  if (unit_survival(sampled, slices, unit.design_k, wall) >= target) return sampled;
  std::size_t lo = 0;  // S(all zeroed) = 1 >= target
  std::size_t hi = n;  // untouched, S < target
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (survival_with_cut(mid) >= target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  std::vector<Complex> v = sampled.values();
  for (std::size_t j = lo; j < v.size(); ++j) v[j] = Complex{0.0};
  return sampled.with_values(std::move(v));
}

}  // namespace detail

// Full inversion construction. Builds the first unit at k1, then for each
// further k evaluates the discretized composite, back-solves the reflection
// the new unit must cancel, and appends the new unit's discretization. The
// recursion treats the growing composite as a single first unit throughout.
// Resolution counts slices per unit length; sampling uses slice boundaries
// plus midpoints so discretization picks exact midpoint values.
inline BarrierChain build_composite(const std::vector<Wavenumber>& k_list,
                                    const std::vector<double>& unit_lengths, int resolution,
                                    const TruncationPolicy& policy, bool wall_terminated) {
  if (k_list.empty()) throw std::invalid_argument("build_composite: k_list is empty");
  if (unit_lengths.size() != k_list.size()) {
    throw std::invalid_argument("build_composite: k_list and unit_lengths differ in size");
  }
  for (double l : unit_lengths) {
    if (!(l > 0.0)) throw std::invalid_argument("build_composite: unit lengths must be positive");
  }
  if (resolution < 100) throw std::invalid_argument("build_composite: resolution must be >= 100");
  policy.validate();
  for (std::size_t i = 0; i < k_list.size(); ++i) {
    for (std::size_t j = i + 1; j < k_list.size(); ++j) {
      if (k_list[i].value() == k_list[j].value()) {
        throw DuplicateWavenumber("build_composite: repeated design wavenumber");
      }
    }
  }

  const auto slices_for = [resolution](double length) {
    const auto s = static_cast<std::size_t>(std::llround(resolution * length));
    return s < 1 ? std::size_t{1} : s;
  };

  BarrierChain chain{0.0};
  for (std::size_t i = 0; i < k_list.size(); ++i) {
    const bool last = i + 1 == k_list.size();
    const bool wall_unit = wall_terminated && last;
    const double z = chain.end();
    const double length = unit_lengths[i];
    const std::size_t slices = slices_for(length);

    InversionUnit unit = [&] {
      if (i == 0) {
        return wall_unit ? detail::make_quadratic_unit(Complex{0.0}, z, length, k_list[0])
                         : detail::make_cubic_unit(Complex{0.0}, z, length, k_list[0]);
      }
      const ScatteringAmplitudes amps = amplitudes(chain, k_list[i]);
      return wall_unit ? build_wall_unit(amps, z, length, k_list[i])
                       : build_next_unit(amps, z, length, k_list[i]);
    }();

    SampledPotential sampled = sample_unit(unit, 2 * slices + 1, policy);
    if (i == 0 && policy.target_survival) {
      sampled = detail::trim_to_target(sampled, unit, slices, *policy.target_survival,
                                       wall_terminated && k_list.size() == 1);
    }
    chain.extend(discretize(sampled, slices));
  }
  return chain;
}

}  // namespace cap1d
