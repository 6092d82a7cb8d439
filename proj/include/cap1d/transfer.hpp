#pragma once

// Exact evaluation of scattering amplitudes, survivals, hard-wall reflections
// and their parameter gradients for barrier chains via 2x2 transfer matrices.
//
// A transfer matrix maps the plane-wave coefficient pair (A, B) of
// psi = A e^{ikx} + B e^{-ikx}, taken in the global frame on the left of a
// region, to the pair on its right. Slab matrices are assembled from the
// even-in-q building blocks cos(q d), sin(q d)/q and q sin(q d) with
// q^2 = k^2 - V, so the branch of q = sqrt(k^2 - V) never matters and the
// q -> 0 interior (linear solutions) is the analytic limit of the series.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "cap1d/core.hpp"

namespace cap1d {

struct TransferMatrix {
  Complex m11, m12, m21, m22;
  Wavenumber k;
  double x_left;
  double x_right;

  Complex det() const { return m11 * m22 - m12 * m21; }
};

// Derivatives of one slab matrix with respect to the real and imaginary
// parts of its height, entries in row-major order (m11, m12, m21, m22).
struct TransferGradient {
  std::array<Complex, 4> dm_dre;
  std::array<Complex, 4> dm_dim;
};

// Per-slab derivatives of the survival at one wavenumber.
struct SurvivalGradient {
  double d_re;
  double d_im;
};

namespace detail {

struct Mat2 {
  Complex m11{1.0}, m12{0.0}, m21{0.0}, m22{1.0};
};

inline Mat2 mul(const Mat2& a, const Mat2& b) {
  return {a.m11 * b.m11 + a.m12 * b.m21, a.m11 * b.m12 + a.m12 * b.m22,
          a.m21 * b.m11 + a.m22 * b.m21, a.m21 * b.m12 + a.m22 * b.m22};
}

// cos(q d), sin(q d)/q, q sin(q d) and their d/dV derivatives, all as
// analytic functions of w = q^2 = k^2 - V. Near w d^2 = 0 the direct forms
// lose digits (0/0 and cancellation), so an even power series takes over.
struct SlabBlocks {
  Complex c, g, h;     // cos(q d), sin(q d)/q, q sin(q d)
  Complex dc, dg, dh;  // d/dV of the above
};

inline SlabBlocks slab_blocks(Complex height, double d, double k, bool with_derivative) {
  SlabBlocks out{};
  const Complex w = k * k - height;
  const Complex q = std::sqrt(w);
  if (std::abs(q.imag()) * d > 700.0) {
    throw OverflowError("slab_matrix: |Im q| * width > 700, hyperbolic overflow");
  }
  const Complex u = w * d * d;
  if (std::abs(u) < 1e-6) {
    const Complex u2 = u * u;
    out.c = 1.0 - u / 2.0 + u2 / 24.0 - u * u2 / 720.0;
    const Complex sinc = 1.0 - u / 6.0 + u2 / 120.0 - u * u2 / 5040.0;
    out.g = d * sinc;
    out.h = w * d * sinc;
    if (with_derivative) {
      out.dc = d * d * (0.5 - u / 12.0 + u2 / 240.0);
      out.dg = d * d * d * (1.0 / 6.0 - u / 60.0 + u2 / 1680.0);
      out.dh = -out.g + w * out.dg;
    }
  } else {
    const Complex qd = q * d;
    const Complex s = std::sin(qd);
    out.c = std::cos(qd);
    out.g = s / q;
    out.h = q * s;
    if (with_derivative) {
      out.dc = 0.5 * d * out.g;
      out.dg = -(d * out.c - out.g) / (2.0 * w);
      out.dh = -out.g + w * out.dg;
    }
  }
  return out;
}

struct SlabParts {
  Complex c, alpha, beta;
  Complex e_span;  // e^{-ik(x1-x0)}
  Complex e_sum;   // e^{+ik(x0+x1)}
};

inline SlabParts slab_parts(const SlabBlocks& b, double d, double x0, double k) {
  SlabParts p{};
  p.c = b.c;
  p.alpha = 0.5 * iunit * (k * b.g + b.h / k);
  p.beta = 0.5 * iunit * (k * b.g - b.h / k);
  p.e_span = std::exp(Complex{0.0, -k * d});
  p.e_sum = std::exp(Complex{0.0, k * (2.0 * x0 + d)});
  return p;
}

inline Mat2 assemble(const SlabParts& p) {
  return {(p.c + p.alpha) * p.e_span, -p.beta / p.e_sum,
          p.beta * p.e_sum, (p.c - p.alpha) / p.e_span};
}

// dM/dV (complex derivative; slab entries are entire in V).
inline Mat2 assemble_derivative(const SlabBlocks& b, const SlabParts& p, double k) {
  const Complex dalpha = 0.5 * iunit * (k * b.dg + b.dh / k);
  const Complex dbeta = 0.5 * iunit * (k * b.dg - b.dh / k);
  return {(b.dc + dalpha) * p.e_span, -dbeta / p.e_sum,
          dbeta * p.e_sum, (b.dc - dalpha) / p.e_span};
}

inline Mat2 slab_mat(const Complex& height, double width, double position, double k) {
  const SlabBlocks b = slab_blocks(height, width, k, false);
  return assemble(slab_parts(b, width, position, k));
}

}  // namespace detail

// Transfer matrix of one square barrier whose left edge sits at `position`.
// V = 0 yields the identity; det = 1 for any complex height.
inline TransferMatrix slab_matrix(const SquareBarrier& barrier, double position, Wavenumber k) {
  const detail::Mat2 m = detail::slab_mat(barrier.height, barrier.width, position, k.value());
  return {m.m11, m.m12, m.m21, m.m22, k, position, position + barrier.width};
}

// Derivatives of the slab matrix with respect to Re V and Im V.
inline TransferGradient slab_matrix_gradient(const SquareBarrier& barrier, double position,
                                             Wavenumber k) {
  const double kk = k.value();
  const detail::SlabBlocks b = detail::slab_blocks(barrier.height, barrier.width, kk, true);
  const detail::SlabParts p = detail::slab_parts(b, barrier.width, position, kk);
  const detail::Mat2 d = detail::assemble_derivative(b, p, kk);
  TransferGradient g{};
  g.dm_dre = {d.m11, d.m12, d.m21, d.m22};
  g.dm_dim = {iunit * d.m11, iunit * d.m12, iunit * d.m21, iunit * d.m22};
  return g;
}

// Ordered product of slab matrices, leftmost slab applied first.
inline TransferMatrix chain_matrix(const BarrierChain& chain, Wavenumber k) {
  if (chain.empty()) throw std::invalid_argument("chain_matrix: empty chain");
  detail::Mat2 m{};
  for (std::size_t i = 0; i < chain.size(); ++i) {
    m = detail::mul(detail::slab_mat(chain.height(i), chain.width(i), chain.edge(i), k.value()), m);
  }
  return {m.m11, m.m12, m.m21, m.m22, k, chain.start(), chain.end()};
}

inline constexpr double kSingularM22 = 1e-14;

// Amplitudes in the global frame extracted from the chain matrix. Uses
// det = 1, so t_left and t_right are the same expression 1/m22.
inline ScatteringAmplitudes amplitudes(const BarrierChain& chain, Wavenumber k) {
  const TransferMatrix m = chain_matrix(chain, k);
  if (std::abs(m.m22) < kSingularM22) {
    throw SpectralSingularity("amplitudes: |m22| below singularity threshold");
  }
  const Complex t = 1.0 / m.m22;
  return {k, t, t, -m.m21 / m.m22, m.m12 / m.m22};
}

// Left-incidence reflection amplitude with a Dirichlet wall psi(x_wall) = 0
// at the chain's right edge. |r| = 1 for real chains.
inline Complex reflect_with_wall(const BarrierChain& chain, Wavenumber k) {
  const TransferMatrix m = chain_matrix(chain, k);
  const double xw = chain.end();
  const Complex ep = std::exp(Complex{0.0, k.value() * xw});
  const Complex em = 1.0 / ep;
  const Complex den = m.m12 * ep + m.m22 * em;
  if (std::abs(den) < kSingularM22) {
    throw SpectralSingularity("reflect_with_wall: wall denominator below threshold");
  }
  return -(m.m11 * ep + m.m21 * em) / den;
}

// Equal-width midpoint discretization of a sampled potential.
inline BarrierChain discretize(const SampledPotential& potential, std::size_t slices) {
  if (slices < 1) throw std::invalid_argument("discretize: slices must be >= 1");
  const double w = potential.length() / static_cast<double>(slices);
  BarrierChain chain{potential.start()};
  for (std::size_t i = 0; i < slices; ++i) {
    const double mid = potential.start() + (static_cast<double>(i) + 0.5) * w;
    chain.append({w, potential.value_at(mid)});
  }
  return chain;
}

// Exact analytic derivatives of S(k) = |r^l|^2 + |t^l|^2 with respect to the
// real and imaginary part of every slab height, via
// dM/dV_j = M_left (dM_j/dV_j) M_right and the chain rule through
// r = -m21/m22, t = 1/m22.
inline std::vector<SurvivalGradient> chain_gradient(const BarrierChain& chain, Wavenumber k) {
  if (chain.empty()) throw std::invalid_argument("chain_gradient: empty chain");
  const std::size_t n = chain.size();
  const double kk = k.value();

  std::vector<detail::Mat2> mats(n), derivs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const detail::SlabBlocks b = detail::slab_blocks(chain.height(i), chain.width(i), kk, true);
    const detail::SlabParts p = detail::slab_parts(b, chain.width(i), chain.edge(i), kk);
    mats[i] = detail::assemble(p);
    derivs[i] = detail::assemble_derivative(b, p, kk);
  }

  // prefix[i] = M_i ... M_1, suffix[i] = M_n ... M_{i+1} (1-based slabs).
  std::vector<detail::Mat2> prefix(n + 1), suffix(n + 1);
  prefix[0] = detail::Mat2{};
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = detail::mul(mats[i], prefix[i]);
  suffix[n] = detail::Mat2{};
  for (std::size_t i = n; i-- > 0;) suffix[i] = detail::mul(suffix[i + 1], mats[i]);

  const detail::Mat2& total = prefix[n];
  if (std::abs(total.m22) < kSingularM22) {
    throw SpectralSingularity("chain_gradient: |m22| below singularity threshold");
  }
  const Complex r = -total.m21 / total.m22;
  const Complex t = 1.0 / total.m22;
  const Complex m22sq = total.m22 * total.m22;

  std::vector<SurvivalGradient> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    const detail::Mat2 d = detail::mul(suffix[j + 1], detail::mul(derivs[j], prefix[j]));
    const Complex dr = -d.m21 / total.m22 + total.m21 * d.m22 / m22sq;
    const Complex dt = -d.m22 / m22sq;
    const Complex inner = std::conj(r) * dr + std::conj(t) * dt;
    out[j] = {2.0 * inner.real(), -2.0 * inner.imag()};
  }
  return out;
}

}  // namespace cap1d
