#pragma once

// The conventional -i eta x^2 absorber used as the comparison curve, with a
// 1D grid-plus-golden-section optimization of eta.

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "cap1d/core.hpp"
#include "cap1d/optimize.hpp"
#include "cap1d/transfer.hpp"

namespace cap1d {

struct QuadraticAbsorber {
  double eta;
  double length;
  int slices;

  void validate() const {
    if (!(eta >= 0.0) || !std::isfinite(eta)) {
      throw std::invalid_argument("QuadraticAbsorber: eta must be >= 0");
    }
    if (!(length > 0.0)) throw std::invalid_argument("QuadraticAbsorber: length must be positive");
    if (slices < 1) throw std::invalid_argument("QuadraticAbsorber: slices must be >= 1");
  }
};

// Midpoint discretization of V(x) = -i eta x^2 on [0, length].
inline BarrierChain quadratic_absorber_chain(const QuadraticAbsorber& a) {
  a.validate();
  BarrierChain chain{0.0};
  const double w = a.length / a.slices;
  for (int j = 0; j < a.slices; ++j) {
    const double xm = (j + 0.5) * w;
    chain.append({w, Complex{0.0, -a.eta * xm * xm}});
  }
  return chain;
}

inline double baseline_survival(const QuadraticAbsorber& absorber, Wavenumber k) {
  return survival(amplitudes(quadratic_absorber_chain(absorber), k));
}

struct EtaOptimum {
  double eta;
  double f;
  // every (eta, f) evaluation made during the scan and refinement, sorted by eta
  std::vector<std::pair<double, double>> evaluations;
};

// Coarse log-spaced grid scan followed by golden-section refinement around
// the best grid point. Throws BracketTooNarrow when the grid minimum sits at
// a bracket endpoint.
inline EtaOptimum optimize_eta(const ObjectiveSpec& spec, double length,
                               std::pair<double, double> bracket, int slices = 1000,
                               int grid_points = 200) {
  const auto [eta_lo, eta_hi] = bracket;
  if (!(eta_lo >= 0.0) || !(eta_lo < eta_hi)) {
    throw std::invalid_argument("optimize_eta: need 0 <= eta_lo < eta_hi");
  }
  if (!(length > 0.0)) throw std::invalid_argument("optimize_eta: length must be positive");
  if (grid_points < 3) throw std::invalid_argument("optimize_eta: need at least 3 grid points");

  const auto f_of = [&](double eta) {
    double f = 0.0;
    for (const Wavenumber& k : spec.k_points()) {
      f += baseline_survival({eta, length, slices}, k);
    }
    return f;
  };

  EtaOptimum out{0.0, 0.0, {}};
  const auto eval = [&](double eta) {
    const double f = f_of(eta);
    out.evaluations.emplace_back(eta, f);
    return f;
  };

  // A zero lower edge cannot be log-spaced; scan from eight decades below
  // the upper edge instead.
  const double scan_lo = eta_lo > 0.0 ? eta_lo : eta_hi * 1e-8;
  const double ratio = eta_hi / scan_lo;
  std::vector<double> grid(grid_points);
  std::vector<double> fg(grid_points);
  for (int i = 0; i < grid_points; ++i) {
    grid[i] = scan_lo * std::pow(ratio, static_cast<double>(i) / (grid_points - 1));
    fg[i] = eval(grid[i]);
  }
  const auto best_it = std::min_element(fg.begin(), fg.end());
  const int best_i = static_cast<int>(best_it - fg.begin());
  if (best_i == 0 || best_i == grid_points - 1) {
    throw BracketTooNarrow("optimize_eta: scan minimum at a bracket endpoint");
  }

  // Golden-section on the bracketing triple.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = grid[best_i - 1];
  double b = grid[best_i + 1];
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = eval(x1);
  double f2 = eval(x2);
  while (b - a > 1e-12 * std::max(1.0, b)) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = eval(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = eval(x2);
    }
  }

  std::sort(out.evaluations.begin(), out.evaluations.end());
  out.eta = out.evaluations.front().first;
  out.f = out.evaluations.front().second;
  for (const auto& [eta, f] : out.evaluations) {
    if (f < out.f) {
      out.eta = eta;
      out.f = f;
    }
  }
  return out;
}

}  // namespace cap1d
