#pragma once

// N equal-width complex square barriers whose 2N real parameters
// are tuned to minimize the summed survival at a set of chosen wavenumbers.
// Local searches are BFGS with backtracking line search driven by the exact
// transfer-matrix gradients; the nonconvex landscape is covered by seeded
// multi-start.

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "cap1d/core.hpp"
#include "cap1d/transfer.hpp"

namespace cap1d {

struct BarrierParams {
  double total_length;
  std::vector<Complex> heights;

  std::size_t n_barriers() const noexcept { return heights.size(); }
  double barrier_width() const { return total_length / static_cast<double>(heights.size()); }

  BarrierChain to_chain() const {
    if (heights.empty()) throw std::invalid_argument("BarrierParams: no barriers");
    if (!(total_length > 0.0)) throw std::invalid_argument("BarrierParams: bad total length");
    BarrierChain chain{0.0};
    const double w = barrier_width();
    for (const Complex& v : heights) chain.append({w, v});
    return chain;
  }
};

class ObjectiveSpec {
 public:
  explicit ObjectiveSpec(std::vector<Wavenumber> k_points) : k_points_{std::move(k_points)} {
    if (k_points_.empty()) throw std::invalid_argument("ObjectiveSpec: no wavenumbers");
    for (std::size_t i = 0; i < k_points_.size(); ++i) {
      for (std::size_t j = i + 1; j < k_points_.size(); ++j) {
        if (k_points_[i].value() == k_points_[j].value()) {
          throw DuplicateWavenumber("ObjectiveSpec: repeated wavenumber");
        }
      }
    }
  }
  const std::vector<Wavenumber>& k_points() const noexcept { return k_points_; }
  std::size_t size() const noexcept { return k_points_.size(); }

 private:
  std::vector<Wavenumber> k_points_;
};

struct OptimizeConfig {
  int restarts = 20;
  std::uint64_t seed = 1;
  double grad_tol = 1e-8;
  double f_rel_tol = 1e-12;
  int stall_limit = 5;
  int max_iters = 2000;
  bool collect_trace = false;
  // Deterministic extra start points tried before the random ones (each of
  // size N); used e.g. to warm-start N+1 from a split N-barrier solution.
  std::vector<std::vector<Complex>> extra_starts{};
};

struct OptimizationResult {
  BarrierParams best_params;
  double best_f;
  std::vector<double> per_point_survivals;
  int restarts_used;
  bool converged;
  std::vector<std::pair<int, double>> trace;  // accepted (iteration, f) of the best start
};

// f = sum over the chosen wavenumbers of S(k_a).
inline double objective(const BarrierParams& params, const ObjectiveSpec& spec) {
  const BarrierChain chain = params.to_chain();
  double f = 0.0;
  for (const Wavenumber& k : spec.k_points()) f += survival(amplitudes(chain, k));
  return f;
}

// Gradient of f in the ordering (Re V_1, Im V_1, ..., Re V_N, Im V_N).
inline std::vector<double> objective_gradient(const BarrierParams& params,
                                              const ObjectiveSpec& spec) {
  const BarrierChain chain = params.to_chain();
  std::vector<double> grad(2 * params.n_barriers(), 0.0);
  for (const Wavenumber& k : spec.k_points()) {
    const std::vector<SurvivalGradient> g = chain_gradient(chain, k);
    for (std::size_t j = 0; j < g.size(); ++j) {
      grad[2 * j] += g[j].d_re;
      grad[2 * j + 1] += g[j].d_im;
    }
  }
  return grad;
}

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double nrm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

// 53-bit uniform in [0, 1); hand-rolled so results do not depend on the
// standard library's distribution implementation.
inline double u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct LocalSearchResult {
  std::vector<double> x;
  double f = std::numeric_limits<double>::infinity();
  bool converged = false;
  bool finite_start = false;
  std::vector<std::pair<int, double>> trace;
};

// BFGS on the flattened real parameters. Non-finite objective values during
// the line search (including spectral singularities and slab overflow, which
// the wrapper maps to +inf) reject the step instead of aborting the run.
template <typename F, typename G>
LocalSearchResult bfgs_minimize(const F& fn, const G& grad_fn, std::vector<double> x,
                                const OptimizeConfig& cfg) {
  const std::size_t n = x.size();
  LocalSearchResult res;
  double f = fn(x);
  if (!std::isfinite(f)) return res;
  res.finite_start = true;

  std::vector<double> g;
  try {
    g = grad_fn(x);
  } catch (const Error&) {
    res.x = std::move(x);
    res.f = f;
    return res;
  }

  std::vector<double> h(n * n, 0.0);  // inverse Hessian approximation
  const auto reset_h = [&] {
    std::fill(h.begin(), h.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) h[i * n + i] = 1.0;
  };
  reset_h();

  if (cfg.collect_trace) res.trace.emplace_back(0, f);
  int stall = 0;
  std::vector<double> d(n), x_new(n), g_new, s(n), yv(n), hy(n);

  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    if (nrm2(g) < cfg.grad_tol) {
      res.converged = true;
      break;
    }
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += h[i * n + j] * g[j];
      d[i] = -acc;
    }
    double dg = dot(d, g);
    if (!(dg < 0.0)) {
      reset_h();
      for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
      dg = -dot(g, g);
    }

    double t = 1.0;
    double f_new = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int back = 0; back < 60; ++back) {
      for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + t * d[i];
      f_new = fn(x_new);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * t * dg) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      res.converged = true;  // no representable descent step left
      break;
    }

    try {
      g_new = grad_fn(x_new);
    } catch (const Error&) {
      x = x_new;
      f = f_new;
      break;
    }

    const double rel_dec = (f - f_new) / std::max(std::abs(f), 1e-300);
    stall = rel_dec < cfg.f_rel_tol ? stall + 1 : 0;

    for (std::size_t i = 0; i < n; ++i) {
      s[i] = x_new[i] - x[i];
      yv[i] = g_new[i] - g[i];
    }
    const double sy = dot(s, yv);
    if (sy > 1e-12 * nrm2(s) * nrm2(yv)) {
      const double rho = 1.0 / sy;
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += h[i * n + j] * yv[j];
        hy[i] = acc;
      }
      const double yhy = dot(yv, hy);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          h[i * n + j] += (1.0 + rho * yhy) * rho * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
        }
      }
    }

    x = x_new;
    f = f_new;
    g = std::move(g_new);
    if (cfg.collect_trace) res.trace.emplace_back(iter, f);
    if (stall >= cfg.stall_limit) {
      res.converged = true;
      break;
    }
  }

  res.x = std::move(x);
  res.f = f;
  return res;
}

}  // namespace detail

// Multi-start minimization of the summed survival. Random starts draw
// Re V_j uniform in [-kmax^2, kmax^2] and Im V_j uniform in [-5 kmax^2, 0]
// with kmax = max(k_points); results are deterministic given the seed, ties
// between restarts break toward the earlier one.
inline OptimizationResult optimize_barriers(std::size_t n_barriers, double total_length,
                                            const ObjectiveSpec& spec,
                                            const OptimizeConfig& cfg = {}) {
  if (n_barriers < 1) throw std::invalid_argument("optimize_barriers: need at least one barrier");
  if (!(total_length > 0.0)) throw std::invalid_argument("optimize_barriers: bad total length");
  if (cfg.restarts < 1) throw std::invalid_argument("optimize_barriers: need at least one restart");

  double kmax = 0.0;
  for (const Wavenumber& k : spec.k_points()) kmax = std::max(kmax, k.value());
  const double scale = kmax * kmax;

  const auto to_params = [&](const std::vector<double>& x) {
    BarrierParams p{total_length, {}};
    p.heights.reserve(n_barriers);
    for (std::size_t j = 0; j < n_barriers; ++j) p.heights.emplace_back(x[2 * j], x[2 * j + 1]);
    return p;
  };
  const auto fn = [&](const std::vector<double>& x) {
    try {
      return objective(to_params(x), spec);
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  const auto grad_fn = [&](const std::vector<double>& x) {
    return objective_gradient(to_params(x), spec);
  };

  std::vector<std::vector<double>> starts;
  for (const auto& hs : cfg.extra_starts) {
    if (hs.size() != n_barriers) {
      throw std::invalid_argument("optimize_barriers: extra start has wrong barrier count");
    }
    std::vector<double> x(2 * n_barriers);
    for (std::size_t j = 0; j < n_barriers; ++j) {
      x[2 * j] = hs[j].real();
      x[2 * j + 1] = hs[j].imag();
    }
    starts.push_back(std::move(x));
  }
  std::mt19937_64 rng{cfg.seed};
  for (int r = 0; r < cfg.restarts; ++r) {
    std::vector<double> x(2 * n_barriers);
    for (std::size_t j = 0; j < n_barriers; ++j) {
      x[2 * j] = scale * (2.0 * detail::u01(rng) - 1.0);
      x[2 * j + 1] = -5.0 * scale * detail::u01(rng);
    }
    starts.push_back(std::move(x));
  }

  detail::LocalSearchResult best;
  bool any_finite = false;
  for (const auto& x0 : starts) {
    detail::LocalSearchResult local = detail::bfgs_minimize(fn, grad_fn, x0, cfg);
    any_finite = any_finite || local.finite_start;
    if (local.finite_start && local.f < best.f) best = std::move(local);
  }
  if (!any_finite) {
    throw NoFiniteStart("optimize_barriers: every restart began at a non-finite objective");
  }

  OptimizationResult out{to_params(best.x), 0.0, {}, static_cast<int>(starts.size()),
                         best.converged, std::move(best.trace)};
  const BarrierChain chain = out.best_params.to_chain();
  out.per_point_survivals.reserve(spec.size());
  double total = 0.0;
  for (const Wavenumber& k : spec.k_points()) {
    const double s = survival(amplitudes(chain, k));
    out.per_point_survivals.push_back(s);
    total += s;
  }
  out.best_f = total;
  return out;
}

}  // namespace cap1d
