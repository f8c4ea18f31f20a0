#include "doctest.h"

#include <cmath>

#include "hlc/error.hpp"
#include "hlc/states.hpp"
#include "support.hpp"

using namespace hlc;

TEST_CASE("werner state entries") {
  const double a = 0.37;
  const ComplexMatrix w = werner(WernerParams(a)).matrix();
  CHECK(std::abs(w(0, 0).real() - (1 + a) / 4) < 1e-15);
  CHECK(std::abs(w(1, 1).real() - (1 - a) / 4) < 1e-15);
  CHECK(std::abs(w(2, 2).real() - (1 - a) / 4) < 1e-15);
  CHECK(std::abs(w(0, 3).real() - a / 2) < 1e-15);
  CHECK(std::abs(w(1, 2)) < 1e-15);
  CHECK_THROWS_AS(WernerParams(1.2), DomainError);
}

TEST_CASE("canonical family entries") {
  const double a = 0.4, t = 0.3, c = std::cos(t), s = std::sin(t);
  const ComplexMatrix r = canonical_state(CanonicalParams(a, t)).matrix();
  CHECK(std::abs(r(0, 0).real() - (a * c * c + (1 - a) * c * c / 2)) < 1e-15);
  CHECK(std::abs(r(1, 1).real() - (1 - a) * c * c / 2) < 1e-15);
  CHECK(std::abs(r(2, 2).real() - (1 - a) * s * s / 2) < 1e-15);
  CHECK(std::abs(r(3, 3).real() - (a * s * s + (1 - a) * s * s / 2)) < 1e-15);
  CHECK(std::abs(r(0, 3).real() - a * c * s) < 1e-15);
  // theta = pi/4 gives back the Werner state.
  CHECK(max_abs_distance(canonical_matrix(a, kQuarterPi), werner(WernerParams(a)).matrix()) < 1e-15);
  CHECK_THROWS_AS(CanonicalParams(0.5, 1.0), DomainError);
}

TEST_CASE("theta folding uses the local-unitary symmetries") {
  CHECK(std::abs(fold_theta(-0.3) - 0.3) < 1e-15);
  CHECK(std::abs(fold_theta(std::numbers::pi / 2 - 0.2) - 0.2) < 1e-14);
  CHECK(std::abs(fold_theta(std::numbers::pi + 0.1) - 0.1) < 1e-14);
  CHECK(std::abs(CanonicalParams::folded(0.5, -0.7).theta() - 0.7) < 1e-15);
}

TEST_CASE("diagonal filter maps Werner to the canonical family") {
  const double a = 0.55, t = 0.4;
  ComplexMatrix f = ComplexMatrix::Zero(2, 2);
  f(0, 0) = 1.0;
  f(1, 1) = t;
  const auto out = apply_filters(werner(WernerParams(a)), FilterPair(f, identity2()));
  CHECK(max_abs_distance(out.state.matrix(), canonical_matrix(a, std::atan(t))) < 1e-14);
  CHECK(std::abs(out.success_prob - (1 + t * t) / 2) < 1e-15);

  const auto nf = filter_normal_form(f, a);
  CHECK(std::abs(nf.params.theta() - std::atan(t)) < 1e-14);
  CHECK(std::abs(nf.normalization - (1 + t * t) / 2) < 1e-15);
}

TEST_CASE("normal form reproduces filtered Werner states") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 30; ++trial) {
    const long d = 2 + trial % 3;
    const ComplexMatrix f = hlc_test::random_filter(rng, d, 0.9);
    const double a = 0.1 + 0.03 * trial;
    const auto out = apply_filters(werner(WernerParams(a)), FilterPair(f, identity2()));
    const auto nf = filter_normal_form(f, a);
    CHECK(max_abs_distance(normal_form_state(nf), out.state.matrix()) < 1e-10);
    CHECK(std::abs(nf.normalization - out.success_prob) < 1e-12);
    CHECK(nf.params.theta() <= kQuarterPi + 1e-15);
  }
}

TEST_CASE("rank-1 and zero filters") {
  ComplexMatrix f = ComplexMatrix::Zero(3, 2);
  f(0, 0) = 0.5;
  f(1, 1) = 0.5;
  f(1, 0) = 0.5;
  f(0, 1) = 0.5;  // rows equal: rank 1
  const auto nf = filter_normal_form(f, 0.7);
  CHECK(nf.separable_output);
  CHECK(nf.params.theta() == 0.0);
  CHECK_THROWS_AS(filter_normal_form(ComplexMatrix::Zero(2, 2), 0.5), DomainError);
  CHECK_THROWS_AS(apply_filters(werner(WernerParams(0.5)), FilterPair(ComplexMatrix::Zero(2, 2), identity2())),
                  DomainError);
  CHECK_THROWS_AS(FilterPair(2.0 * identity2(), identity2()), DomainError);
}

TEST_CASE("projective-model condition and rho_theta") {
  // cos^2(0.2) - 0.5 / (1.25 * 0.421875) = cos^2(0.2) - 0.948148...
  const double m = eq18_margin(0.75, 0.1);
  CHECK(std::abs(m - (std::cos(0.2) * std::cos(0.2) - 0.5 / (1.25 * 0.421875))) < 1e-15);
  CHECK(m > 0.0);
  CHECK(eq18_margin(0.75, 0.12) < 0.0);
  CHECK_THROWS_AS(rho_theta(0.75, 0.3), DomainError);

  const double t = 0.08;
  const ComplexMatrix r = rho_theta(0.75, t).matrix();
  const ComplexMatrix base = canonical_matrix(0.75, t);
  ComplexMatrix p0 = ComplexMatrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  const ComplexMatrix expect = (base + tensor(p0, partial_trace(base, Subsystem::A, 2, 2))) / 2.0;
  CHECK(max_abs_distance(r, expect) < 1e-15);
}
