#pragma once

// Core value types and conventions shared by the whole toolkit.
//
// Everything is dimensionless: lengths are measured in units of the first
// potential unit's width d1, energies in hbar^2/(2 m d1^2), so the stationary
// equation reads psi'' + (k^2 - V) psi = 0 and the wavenumber is k = d1 p/hbar.
// All types here are immutable values and all operations are pure functions.

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cap1d {

using Complex = std::complex<double>;

inline constexpr Complex iunit{0.0, 1.0};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Pole of the scattering amplitudes (|m22| below threshold); only possible
// for non-real potentials.
class SpectralSingularity : public Error {
 public:
  using Error::Error;
};

// Hyperbolic growth inside a slab exceeds the representable range
// (|Im q| * width > 700).
class OverflowError : public Error {
 public:
  using Error::Error;
};

// |1 - r2_l * r1_r| below threshold in the multiple-scattering denominator.
class ResonanceDenominator : public Error {
 public:
  using Error::Error;
};

// |r1_l r1_r - t1_l t1_r| below threshold in the next-unit back-solve.
class DegenerateBacksolve : public Error {
 public:
  using Error::Error;
};

class DuplicateWavenumber : public Error {
 public:
  using Error::Error;
};

// Every optimizer restart started from a non-finite objective value.
class NoFiniteStart : public Error {
 public:
  using Error::Error;
};

// The eta scan put the minimum at a bracket endpoint.
class BracketTooNarrow : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Positive dimensionless wavenumber.
class Wavenumber {
 public:
  explicit Wavenumber(double k) : k_{k} {
    if (!(k > 0.0) || !std::isfinite(k)) {
      throw std::invalid_argument("Wavenumber: k must be positive and finite");
    }
  }
  double value() const noexcept { return k_; }

 private:
  double k_;
};

// One piecewise-constant segment: complex height over a positive width.
struct SquareBarrier {
  double width;
  Complex height;

  SquareBarrier(double w, Complex h) : width{w}, height{h} {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("SquareBarrier: width must be positive and finite");
    }
  }
};

// Contiguous run of square barriers. The canonical state is the list of cut
// positions plus one height per slab; widths are always re-derived from the
// cuts so that a chain rebuilt from its emitted boundaries evaluates
// bit-identically.
class BarrierChain {
 public:
  BarrierChain() : cuts_{0.0} {}
  explicit BarrierChain(double start) : cuts_{start} {
    if (!std::isfinite(start)) throw std::invalid_argument("BarrierChain: start must be finite");
  }
  BarrierChain(double start, const std::vector<SquareBarrier>& segments) : BarrierChain{start} {
    for (const auto& s : segments) append(s);
  }

  static BarrierChain from_boundaries(std::vector<double> cuts, std::vector<Complex> heights) {
    if (heights.empty() || cuts.size() != heights.size() + 1) {
      throw std::invalid_argument("BarrierChain: need n+1 boundaries for n heights");
    }
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      if (!(cuts[i + 1] > cuts[i])) {
        throw std::invalid_argument("BarrierChain: boundaries must be strictly increasing");
      }
    }
    BarrierChain c;
    c.cuts_ = std::move(cuts);
    c.heights_ = std::move(heights);
    return c;
  }

  void append(const SquareBarrier& s) {
    cuts_.push_back(cuts_.back() + s.width);
    heights_.push_back(s.height);
  }

  // Appends a chain that begins where this one ends.
  void extend(const BarrierChain& tail) {
    if (tail.empty()) return;
    const double gap = std::abs(tail.start() - end());
    if (gap > 1e-9 * std::max(1.0, std::abs(end()))) {
      throw std::invalid_argument("BarrierChain::extend: tail is not contiguous");
    }
    for (std::size_t i = 0; i < tail.size(); ++i) {
      cuts_.push_back(tail.cuts_[i + 1]);
      heights_.push_back(tail.heights_[i]);
    }
  }

  bool empty() const noexcept { return heights_.empty(); }
  std::size_t size() const noexcept { return heights_.size(); }
  double start() const noexcept { return cuts_.front(); }
  double end() const noexcept { return cuts_.back(); }
  double total_length() const noexcept { return end() - start(); }
  double edge(std::size_t i) const { return cuts_.at(i); }
  double width(std::size_t i) const { return cuts_.at(i + 1) - cuts_.at(i); }
  const Complex& height(std::size_t i) const { return heights_.at(i); }
  const std::vector<double>& edges() const noexcept { return cuts_; }
  const std::vector<Complex>& heights() const noexcept { return heights_; }

  BarrierChain translated(double delta) const {
    BarrierChain c{*this};
    for (auto& x : c.cuts_) x += delta;
    return c;
  }

 private:
  std::vector<double> cuts_;
  std::vector<Complex> heights_;
};

// Complex potential sampled on a uniform grid over [start, start + length].
class SampledPotential {
 public:
  SampledPotential(double start, double length, std::vector<Complex> values)
      : start_{start}, length_{length}, values_{std::move(values)} {
    if (!(length > 0.0) || !std::isfinite(length) || !std::isfinite(start)) {
      throw std::invalid_argument("SampledPotential: bad support interval");
    }
    if (values_.size() < 2) {
      throw std::invalid_argument("SampledPotential: need at least 2 samples");
    }
  }

  double start() const noexcept { return start_; }
  double length() const noexcept { return length_; }
  std::size_t size() const noexcept { return values_.size(); }
  double spacing() const noexcept { return length_ / static_cast<double>(values_.size() - 1); }
  const std::vector<Complex>& values() const noexcept { return values_; }

  SampledPotential with_values(std::vector<Complex> v) const {
    return SampledPotential{start_, length_, std::move(v)};
  }

  // Linear interpolation between grid samples; clamped to the end values
  // outside the support.
  Complex value_at(double x) const {
    const double u = (x - start_) / spacing();
    if (u <= 0.0) return values_.front();
    const auto last = static_cast<double>(values_.size() - 1);
    if (u >= last) return values_.back();
    const auto i = static_cast<std::size_t>(u);
    const double f = u - static_cast<double>(i);
    return (1.0 - f) * values_[i] + f * values_[i + 1];
  }

 private:
  double start_;
  double length_;
  std::vector<Complex> values_;
};

// The four amplitudes of one region at one wavenumber, in the global-origin
// phase convention: left incidence is e^{ikx} + r_left e^{-ikx} on the left
// and t_left e^{ikx} on the right, with the mirror convention for right
// incidence.
struct ScatteringAmplitudes {
  Wavenumber k;
  Complex t_left{};
  Complex t_right{};
  Complex r_left{};
  Complex r_right{};
};

// Survival probability S = |r^l|^2 + |t^l|^2. Deliberately not clamped to
// <= 1: potentials with positive imaginary part emit.
inline double survival(const ScatteringAmplitudes& a) {
  return std::norm(a.r_left) + std::norm(a.t_left);
}

}  // namespace cap1d
