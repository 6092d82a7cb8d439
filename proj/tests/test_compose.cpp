#include <catch2/catch_amalgamated.hpp>

#include "cap1d/compose.hpp"
#include "cap1d/inversion.hpp"
#include "cap1d/transfer.hpp"
#include "support.hpp"

using namespace cap1d;
using testsupport::Rng;

namespace {

// Contiguous random pair: unit 1 on [x0, b], unit 2 on [b, ...].
struct ChainPair {
  BarrierChain left, right, whole;
};

ChainPair random_pair(Rng& rng) {
  ChainPair p{testsupport::random_chain(rng, true, rng.uniform(-1.0, 1.0)),
              BarrierChain{}, BarrierChain{}};
  p.right = testsupport::random_chain(rng, true, p.left.end());
  p.whole = p.left;
  p.whole.extend(p.right);
  return p;
}

}  // namespace

TEST_CASE("transparent left unit is the identity element") {
  Rng rng{3};
  const BarrierChain c2 = testsupport::random_chain(rng, true, 1.0);
  const Wavenumber k{1.7};
  const ScatteringAmplitudes a2 = amplitudes(c2, k);
  const ScatteringAmplitudes id{k, 1.0, 1.0, 0.0, 0.0};
  const ScatteringAmplitudes out = compose_amplitudes(id, a2);
  CHECK(out.t_left == a2.t_left);
  CHECK(out.r_left == a2.r_left);
  CHECK(out.t_right == a2.t_right);
  CHECK(out.r_right == a2.r_right);
}

TEST_CASE("a perfect absorber in front makes the composite a perfect absorber") {
  Rng rng{9};
  for (int trial = 0; trial < 50; ++trial) {
    const ScatteringAmplitudes a1{Wavenumber{1.0}, 0.0, rng.complex_in(-1, 1, -1, 1), 0.0,
                                  rng.complex_in(-1, 1, -1, 1)};
    const ScatteringAmplitudes a2{Wavenumber{1.0}, rng.complex_in(-1, 1, -1, 1),
                                  rng.complex_in(-1, 1, -1, 1), rng.complex_in(-0.9, 0.9, -0.9, 0.9),
                                  rng.complex_in(-1, 1, -1, 1)};
    const ScatteringAmplitudes out = compose_amplitudes(a1, a2);
    CHECK(out.t_left == Complex{0.0});  // exactly, not within tolerance
    CHECK(out.r_left == Complex{0.0});
  }
}

TEST_CASE("composition agrees with transfer-matrix concatenation") {
  Rng rng{20250810};
  for (int trial = 0; trial < 300; ++trial) {
    const ChainPair p = random_pair(rng);
    const Wavenumber k{testsupport::random_k(rng)};
    const ScatteringAmplitudes composed =
        compose_amplitudes(amplitudes(p.left, k), amplitudes(p.right, k));
    const ScatteringAmplitudes direct = amplitudes(p.whole, k);
    CHECK(std::abs(composed.t_left - direct.t_left) < 1e-10);
    CHECK(std::abs(composed.r_left - direct.r_left) < 1e-10);
    CHECK(std::abs(composed.t_right - direct.t_right) < 1e-10);
    CHECK(std::abs(composed.r_right - direct.r_right) < 1e-10);
  }
}

TEST_CASE("composition is associative") {
  Rng rng{11};
  for (int trial = 0; trial < 200; ++trial) {
    const BarrierChain c1 = testsupport::random_chain(rng, true, 0.0, 3);
    const BarrierChain c2 = testsupport::random_chain(rng, true, c1.end(), 3);
    const BarrierChain c3 = testsupport::random_chain(rng, true, c2.end(), 3);
    const Wavenumber k{testsupport::random_k(rng)};
    const ScatteringAmplitudes a1 = amplitudes(c1, k), a2 = amplitudes(c2, k),
                               a3 = amplitudes(c3, k);
    const ScatteringAmplitudes left = compose_amplitudes(compose_amplitudes(a1, a2), a3);
    const ScatteringAmplitudes right = compose_amplitudes(a1, compose_amplitudes(a2, a3));
    CHECK(std::abs(left.t_left - right.t_left) < 1e-10);
    CHECK(std::abs(left.r_left - right.r_left) < 1e-10);
    CHECK(std::abs(left.t_right - right.t_right) < 1e-10);
    CHECK(std::abs(left.r_right - right.r_right) < 1e-10);
  }
}

TEST_CASE("wavenumber mismatch is rejected") {
  const ScatteringAmplitudes a{Wavenumber{1.0}, 1.0, 1.0, 0.0, 0.0};
  const ScatteringAmplitudes b{Wavenumber{2.0}, 1.0, 1.0, 0.0, 0.0};
  CHECK_THROWS_AS(compose_amplitudes(a, b), std::invalid_argument);
}

TEST_CASE("resonant denominator is signalled") {
  const ScatteringAmplitudes a1{Wavenumber{1.0}, 0.5, 0.5, 0.2, 1.0};
  const ScatteringAmplitudes a2{Wavenumber{1.0}, 0.5, 0.5, 1.0, 0.2};
  CHECK_THROWS_AS(compose_amplitudes(a1, a2), ResonanceDenominator);
}

TEST_CASE("required_r2 is zero when the first unit is already reflectionless") {
  const ScatteringAmplitudes a1{Wavenumber{1.0}, Complex{0.4, 0.1}, Complex{0.4, 0.1}, 0.0,
                                Complex{0.3, -0.2}};
  CHECK(required_r2(a1) == Complex{0.0});
}

TEST_CASE("required_r2 back-solve cancels the reflection by construction") {
  Rng rng{13};
  for (int trial = 0; trial < 300; ++trial) {
    const BarrierChain c = testsupport::random_chain(rng, true);
    const ScatteringAmplitudes a1 = amplitudes(c, Wavenumber{testsupport::random_k(rng)});
    const Complex den = a1.r_left * a1.r_right - a1.t_left * a1.t_right;
    if (std::abs(den) < 1e-2) continue;  // back-solve precondition with margin
    const Complex r2 = required_r2(a1);
    // the cancellation runs through 1 - r2 r1^r = -t1 t1^r / den; skip draws
    // where that resonance denominator is within roundoff of zero
    if (std::abs(1.0 - r2 * a1.r_right) < 1e-2) continue;
    const ScatteringAmplitudes a2{a1.k, 0.0, rng.complex_in(-1, 1, -1, 1), r2,
                                  rng.complex_in(-1, 1, -1, 1)};
    const ScatteringAmplitudes out = compose_amplitudes(a1, a2);
    CHECK(std::abs(out.r_left) < 1e-12);
    CHECK(out.t_left == Complex{0.0});
  }
}

TEST_CASE("degenerate back-solve is signalled") {
  const ScatteringAmplitudes a1{Wavenumber{1.0}, 0.5, 0.5, 0.5, 0.5};
  CHECK_THROWS_AS(required_r2(a1), DegenerateBacksolve);
}

TEST_CASE("required_r2 regression fixture: first inversion unit at k2 = 1.2") {
  // First unit designed for k1 = 1, default cap 1e3, 4000 slices.
  const InversionUnit unit = build_first_unit(Wavenumber{1.0});
  const SampledPotential pot = sample_unit(unit, 8001, TruncationPolicy{});
  const BarrierChain chain = discretize(pot, 4000);
  const Complex r2 = required_r2(amplitudes(chain, Wavenumber{1.2}));
  const Complex frozen{0.68564114714366453, -0.73355522042496613};
  CHECK(std::abs(r2 - frozen) < 1e-9);
}
