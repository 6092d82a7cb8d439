// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Each criterion carries its runtime budget.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "cap1d/baseline.hpp"
#include "cap1d/compose.hpp"
#include "cap1d/inversion.hpp"
#include "cap1d/optimize.hpp"
#include "cap1d/transfer.hpp"
#include "support.hpp"

using namespace cap1d;
using testsupport::Rng;

namespace {

struct Harness {
  int failures = 0;

  void run(int id, const std::string& name, double budget_seconds,
           const std::function<std::pair<bool, std::string>()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    std::string detail;
    try {
      std::tie(ok, detail) = body();
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string{"exception: "} + e.what();
    }
    const double seconds = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - t0).count();
    if (seconds > budget_seconds) {
      ok = false;
      detail += " [over budget]";
    }
    std::printf("[%s] criterion %2d (%s): %s (%.2f s / %.0f s)\n", ok ? "PASS" : "FAIL", id,
                name.c_str(), detail.c_str(), seconds, budget_seconds);
    std::fflush(stdout);
    if (!ok) ++failures;
  }
};

double chain_survival(const BarrierChain& c, double k) {
  return survival(amplitudes(c, Wavenumber{k}));
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

// width of the contiguous S < thresh interval around k_center, edges located
// by bisection after a coarse outward march
double dip_width(const BarrierChain& chain, double k_center, double thresh) {
  if (chain_survival(chain, k_center) >= thresh) return 0.0;
  const auto cross = [&](double inside, double outside) {
    for (int i = 0; i < 40; ++i) {
      const double mid = 0.5 * (inside + outside);
      (chain_survival(chain, mid) < thresh ? inside : outside) = mid;
    }
    return 0.5 * (inside + outside);
  };
  const double step = 2e-3;
  double lo = k_center, hi = k_center;
  while (lo > 0.1 && chain_survival(chain, lo) < thresh) lo -= step;
  while (hi < 12.0 && chain_survival(chain, hi) < thresh) hi += step;
  return cross(hi - step, hi) - cross(lo + step, lo);
}

const Wavenumber kTriadA{1.94}, kTriadB{4.84}, kTriadC{7.75};

OptimizationResult optimize_multistart(const std::vector<Wavenumber>& ks, std::size_t n,
                                double total_length,
                                const std::vector<std::vector<Complex>>& warm = {}) {
  OptimizeConfig cfg{};
  cfg.restarts = 20;
  cfg.seed = 20250810;
  cfg.extra_starts = warm;
  return optimize_barriers(n, total_length, ObjectiveSpec{ks}, cfg);
}

}  // namespace

int main() {
  Harness h;

  // 1. unitarity and determinant over randomized real chains
  h.run(1, "unitarity", 5.0, [] {
    Rng rng{1001};
    double worst_uni = 0.0, worst_slab_det = 0.0, worst_chain_det_scaled = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      const BarrierChain chain = testsupport::random_chain(rng, false, rng.uniform(-2.0, 2.0));
      const Wavenumber k{testsupport::random_k(rng)};
      for (std::size_t i = 0; i < chain.size(); ++i) {
        const TransferMatrix m = slab_matrix({chain.width(i), chain.height(i)}, chain.edge(i), k);
        worst_slab_det = std::max(worst_slab_det, std::abs(m.det() - 1.0));
      }
      const TransferMatrix m = chain_matrix(chain, k);
      // det of the rounded product drifts as eps * |M|^2; normalize by scale
      const double scale = std::max({1.0, std::abs(m.m11), std::abs(m.m12), std::abs(m.m21),
                                     std::abs(m.m22)});
      worst_chain_det_scaled = std::max(worst_chain_det_scaled,
                                        std::abs(m.det() - 1.0) / (scale * scale));
      const ScatteringAmplitudes a = amplitudes(chain, k);
      worst_uni = std::max(worst_uni, std::abs(std::norm(a.r_left) + std::norm(a.t_left) - 1.0));
    }
    const bool ok = worst_uni < 1e-10 && worst_slab_det < 1e-10 && worst_chain_det_scaled < 1e-10;
    return std::pair{ok, fmt("worst |S-1|=%.1e, slab |det-1|=%.1e, chain |det-1|/|M|^2=%.1e",
                             worst_uni, worst_slab_det, worst_chain_det_scaled)};
  });

  // 2. composition equivalence on contiguous chain pairs
  h.run(2, "composition equivalence", 5.0, [] {
    Rng rng{2002};
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      BarrierChain left = testsupport::random_chain(rng, true, rng.uniform(-1.0, 1.0));
      BarrierChain right = testsupport::random_chain(rng, true, left.end());
      BarrierChain whole = left;
      whole.extend(right);
      const Wavenumber k{testsupport::random_k(rng)};
      const ScatteringAmplitudes c = compose_amplitudes(amplitudes(left, k),
                                                        amplitudes(right, k));
      const ScatteringAmplitudes d = amplitudes(whole, k);
      worst = std::max({worst, std::abs(c.t_left - d.t_left), std::abs(c.r_left - d.r_left),
                        std::abs(c.t_right - d.t_right), std::abs(c.r_right - d.r_right)});
    }
    return std::pair{worst < 1e-10, fmt("worst amplitude mismatch %.1e over 1000 pairs", worst)};
  });

  // 3. back-solve identity
  h.run(3, "back-solve identity", 1.0, [] {
    Rng rng{3003};
    double worst = 0.0;
    int used = 0;
    while (used < 1000) {
      const BarrierChain chain = testsupport::random_chain(rng, true);
      const ScatteringAmplitudes a1 = amplitudes(chain, Wavenumber{testsupport::random_k(rng)});
      const Complex den = a1.r_left * a1.r_right - a1.t_left * a1.t_right;
      if (std::abs(den) < 1e-2) continue;  // back-solve precondition with margin
      const Complex r2 = required_r2(a1);
      // 1 - r2 r1^r = -t1 t1^r / den; near-resonant draws cannot carry the
      // identity at 1e-12 in doubles
      if (std::abs(1.0 - r2 * a1.r_right) < 1e-2) continue;
      ++used;
      const ScatteringAmplitudes a2{a1.k, 0.0, 0.0, r2, 0.0};
      worst = std::max(worst, std::abs(compose_amplitudes(a1, a2).r_left));
    }
    return std::pair{worst < 1e-12, fmt("worst |R^l| = %.1e over 1000 sets", worst)};
  });

  // 4. gradient correctness for the summed-survival objective
  h.run(4, "gradient correctness", 10.0, [] {
    Rng rng{4004};
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      const int n = rng.uniform_int(1, 5);
      const int s = rng.uniform_int(1, 4);
      std::vector<Wavenumber> ks;
      while (static_cast<int>(ks.size()) < s) {
        const double k = rng.uniform(0.5, 5.0);
        bool dup = false;
        for (const auto& kk : ks) dup = dup || std::abs(kk.value() - k) < 1e-6;
        if (!dup) ks.emplace_back(k);
      }
      const ObjectiveSpec spec{ks};
      double kmax = 0.0;
      for (const auto& k : ks) kmax = std::max(kmax, k.value());
      BarrierParams p{rng.uniform(0.5, 3.0), {}};
      for (int j = 0; j < n; ++j) {
        p.heights.push_back({kmax * kmax * rng.uniform(-1.0, 1.0),
                             -5.0 * kmax * kmax * rng.uniform(0.0, 1.0)});
      }
      const std::vector<double> g = objective_gradient(p, spec);
      const double step = 1e-6;
      for (int j = 0; j < n; ++j) {
        for (int part = 0; part < 2; ++part) {
          BarrierParams pp = p, pm = p;
          const Complex dh = part == 0 ? Complex{step, 0.0} : Complex{0.0, step};
          pp.heights[j] += dh;
          pm.heights[j] -= dh;
          const double fd = (objective(pp, spec) - objective(pm, spec)) / (2.0 * step);
          // relative error with an absolute floor covering FD roundoff (~1e-9)
          const double rel = std::abs(g[2 * j + part] - fd) / std::max(std::abs(fd), 3e-2);
          worst = std::max(worst, rel);
        }
      }
    }
    return std::pair{worst < 1e-6, fmt("worst relative error %.1e over 200 configs", worst)};
  });

  // 5. single inversion unit: absorption and resolution convergence
  h.run(5, "single inversion unit", 10.0, [] {
    double worst_s = 0.0, worst_jump = -1.0;
    for (double k1 : {0.5, 1.0, 2.0, 5.0}) {
      const InversionUnit u = build_first_unit(Wavenumber{k1});
      double prev = 2.0;
      for (std::size_t slices : {250u, 500u, 1000u, 2000u, 4000u}) {
        const BarrierChain chain =
            discretize(sample_unit(u, 2 * slices + 1, TruncationPolicy{}), slices);
        const double s = chain_survival(chain, k1);
        if (slices > 250u) worst_jump = std::max(worst_jump, s - prev);
        prev = s;
        if (slices == 4000u) worst_s = std::max(worst_s, s);
      }
    }
    // non-increasing within the 1e-6 discretization noise floor
    const bool ok = worst_s <= 1e-4 && worst_jump <= 1e-6;
    return std::pair{ok, fmt("worst S(k1)@4000 = %.2e, worst doubling increase = %.1e", worst_s,
                             worst_jump)};
  });

  // 6. two-unit composite, k = 1 and 1.2
  h.run(6, "two-unit composite", 30.0, [] {
    TruncationPolicy pol{};
    pol.cap = 1e6;
    pol.target_survival = 1e-5;
    const std::vector<Wavenumber> ks{Wavenumber{1.0}, Wavenumber{1.2}};
    const BarrierChain narrow = build_composite(ks, {1.0, 0.5}, 2000, pol, false);
    const BarrierChain wide = build_composite(ks, {1.0, 1.6}, 2000, pol, false);
    const double s1 = chain_survival(narrow, 1.0);
    const double s2 = chain_survival(narrow, 1.2);
    // S < 0.1 merges both dips into one basin, so the k2 dip is compared at
    // the 1e-3 level where the two-unit structure is actually resolved
    const double w_narrow = dip_width(narrow, 1.2, 1e-3);
    const double w_wide = dip_width(wide, 1.2, 1e-3);
    const bool ok = s1 <= 1e-3 && s2 <= 1e-3 && w_narrow > w_wide && w_narrow > 0.0;
    return std::pair{ok, fmt("S(1)=%.1e S(1.2)=%.1e, dip width L2=0.5: %.4f > L2=1.6: %.4f", s1,
                             s2, w_narrow, w_wide)};
  });

  // 7. three-unit composite with narrow added units
  h.run(7, "three-unit composite", 60.0, [] {
    TruncationPolicy pol{};
    pol.cap = 1e8;
    pol.target_survival = 3e-3;
    const BarrierChain chain =
        build_composite({kTriadA, kTriadB, kTriadC}, {1.0, 0.008, 0.024}, 64000, pol, false);
    const double s1 = chain_survival(chain, kTriadA.value());
    const double s2 = chain_survival(chain, kTriadB.value());
    const double s3 = chain_survival(chain, kTriadC.value());
    const bool ok = s1 <= 1e-2 && s2 <= 1e-2 && s3 <= 1e-2;
    return std::pair{ok, fmt("S = %.1e, %.1e, %.1e at the three targets", s1, s2, s3)};
  });

  // 8. square-barrier optimization performance and N-monotonicity
  h.run(8, "square-barrier optimization", 120.0, [] {
    const OptimizationResult pair_run =
        optimize_multistart({Wavenumber{1.0}, Wavenumber{1.2}}, 3, 1.5);
    double pair_worst = 0.0;
    for (double s : pair_run.per_point_survivals) pair_worst = std::max(pair_worst, s);

    bool monotone = true;
    double prev_f = 0.0;
    std::vector<Complex> prev;
    std::string fs;
    for (std::size_t n = 1; n <= 4; ++n) {
      std::vector<std::vector<Complex>> warm;
      for (std::size_t j = 0; j < prev.size(); ++j) {
        std::vector<Complex> split;  // same chain realized with one barrier split
        for (std::size_t i = 0; i < prev.size(); ++i) {
          split.push_back(prev[i]);
          if (i == j) split.push_back(prev[i]);
        }
        warm.push_back(std::move(split));
      }
      const OptimizationResult r = optimize_multistart({kTriadA, kTriadB, kTriadC}, n, 1.032, warm);
      if (n > 1) monotone = monotone && r.best_f <= prev_f + 1e-9;
      prev_f = r.best_f;
      prev = r.best_params.heights;
      fs += fmt("%s%.1e", n > 1 ? " >= " : "", r.best_f);
    }
    const bool ok = pair_worst < 1e-3 && monotone;
    return std::pair{ok, fmt("s=2 worst per-point %.1e; s=3 best_f %s", pair_worst,
                             fs.c_str())};
  });

  // 9. baseline ordering
  h.run(9, "baseline ordering", 60.0, [] {
    const ObjectiveSpec spec1{{Wavenumber{1.0}, Wavenumber{1.2}}};
    const EtaOptimum b1 = optimize_eta(spec1, 1.5, {1e-2, 1e4});
    const OptimizationResult o1 = optimize_multistart(spec1.k_points(), 3, 1.5);

    const ObjectiveSpec spec2{{kTriadA, kTriadB, kTriadC}};
    const EtaOptimum b2 = optimize_eta(spec2, 1.032, {1e-2, 1e4});
    const OptimizationResult o2 = optimize_multistart(spec2.k_points(), 4, 1.032);

    const bool ok = b1.f > o1.best_f && b2.f > o2.best_f;
    return std::pair{ok, fmt("s=2: eta* f=%.2e > N=3 f=%.1e; s=3: eta* f=%.2e > N=4 f=%.1e",
                             b1.f, o1.best_f, b2.f, o2.best_f)};
  });

  // 10. shift covariance
  h.run(10, "shift covariance", 1.0, [] {
    Rng rng{1010};
    double worst = 0.0;
    for (int trial = 0; trial < 300; ++trial) {
      // moderate spans keep k*x phase arguments small enough that trig
      // rounding stays below the 1e-12 tolerance
      BarrierChain chain{rng.uniform(-1.0, 1.0)};
      const int n = rng.uniform_int(1, 4);
      for (int i = 0; i < n; ++i) {
        chain.append({rng.uniform(0.1, 1.0), rng.complex_in(-10, 10, -10, 10)});
      }
      const double k = rng.uniform(0.5, 8.0);
      const double delta = rng.uniform(0.05, 1.5);
      const ScatteringAmplitudes a = amplitudes(chain, Wavenumber{k});
      // leftward translation by delta: r^l -> r^l e^{-2 i k delta}
      const ScatteringAmplitudes b = amplitudes(chain.translated(-delta), Wavenumber{k});
      worst = std::max(worst,
                       std::abs(b.r_left - a.r_left * std::exp(Complex{0.0, -2.0 * k * delta})));
      worst = std::max(worst, std::abs(b.t_left - a.t_left));
      // and the inverse direction
      const ScatteringAmplitudes c = amplitudes(chain.translated(delta), Wavenumber{k});
      worst = std::max(worst,
                       std::abs(c.r_left - a.r_left * std::exp(Complex{0.0, 2.0 * k * delta})));
    }
    return std::pair{worst < 1e-12, fmt("worst amplitude mismatch %.1e", worst)};
  });

  if (h.failures == 0) {
    std::printf("acceptance: all criteria passed\n");
  } else {
    std::printf("acceptance: %d criterion(s) FAILED\n", h.failures);
  }
  return h.failures == 0 ? 0 : 1;
}
