#include "doctest.h"

#include <cmath>
#include <string>

#include "hlc/analytic_certs.hpp"
#include "hlc/error.hpp"

using namespace hlc;

namespace {

double diag(const DecompositionCertificate& c, const std::string& key) {
  for (const auto& [k, v] : c.diagnostics)
    if (k == key) return v;
  FAIL("missing diagnostic " << key);
  return 0.0;
}

}  // namespace

TEST_CASE("I3 bound at the ends of its interval") {
  CHECK(std::abs(i3_alpha_bound(kQuarterPi) - 5.0 / 12.0) < 1e-12);
  CHECK(std::abs(i3_alpha_bound(0.7365) - 0.363650158248) < 1e-11);
}

TEST_CASE("I3 certificate: Werner reference, diagonal remainder") {
  const auto w = i3_certificate(5.0 / 12.0, kQuarterPi);
  CHECK(w.valid);
  CHECK(w.no_remainder);

  const double a = 0.35, t = 0.75;
  const auto c = i3_certificate(a, t);
  REQUIRE(c.valid);
  CHECK(std::abs(c.q - 12.0 / 5.0 * a * std::sin(2 * t)) < 1e-15);
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k)
      if (i != k) CHECK(std::abs(c.s(i, k)) < 1e-12);
  CHECK(verify_decomposition(c).valid);

  const auto zero = i3_certificate(0.0, 0.76);
  CHECK(zero.valid);
  CHECK(zero.q == 0.0);
}

TEST_CASE("I3 boundary saturation") {
  const double t = 0.7365;
  const double b = i3_alpha_bound(t);
  const auto at = i3_certificate(b, t);
  CHECK(at.valid);
  CHECK(std::abs(at.psd_margin) < 1e-9);
  const auto above = i3_certificate(b + 1e-6, t);
  CHECK_FALSE(above.valid);
  CHECK(above.failure.find("negative eigenvalue") != std::string::npos);
}

TEST_CASE("Lemma 1 closed form") {
  CHECK(lemma1_max_alpha(0.4, 0.3, 0.3) == 0.4);
  CHECK(lemma1_max_alpha(0.4, 0.0, 0.3) == 0.0);
  const double t = 0.4 * std::tan(0.3) / (1.4 * std::tan(0.35));
  CHECK(std::abs(lemma1_max_alpha(0.4, 0.3, 0.35) - t / (1 - t)) < 1e-15);
  CHECK(std::abs(lemma1_max_alpha(0.4, 0.3, 0.35) - 0.319475282571) < 1e-11);
  CHECK_THROWS_AS(lemma1_max_alpha(0.4, 0.35, 0.3), DomainError);
}

TEST_CASE("Lemma 1 certificate at and above its bound") {
  const double a = lemma1_max_alpha(0.4, 0.3, 0.35);
  const auto c = lemma1_certificate(0.4, 0.3, a, 0.35);
  REQUIRE(c.valid);
  CHECK(c.psd_margin >= -1e-9);
  CHECK(diag(c, "anti_diagonal") < 1e-10);
  CHECK(diag(c, "trace_error") < 1e-10);
  CHECK(diag(c, "binding_condition") == 1.0);
  CHECK(std::abs(diag(c, "condition 1 (|00>)")) < 1e-12);

  const auto above = lemma1_certificate(0.4, 0.3, a + 1e-3, 0.35);
  CHECK_FALSE(above.valid);
  CHECK(above.psd_margin < 0.0);
  CHECK(diag(above, "condition 1 (|00>)") < 0.0);

  const auto same = lemma1_certificate(0.4, 0.3, 0.4, 0.3);
  CHECK(same.valid);
  CHECK(same.no_remainder);
}

TEST_CASE("small-theta construction window") {
  for (double t : {0.0, 0.05, 0.1}) {
    CAPTURE(t);
    const auto c = i1_certificate(t);
    CHECK(c.valid);
    CHECK(c.ppt_margin >= -1e-10);
    // The tabulated entries agree with the numerical remainder up to a scale.
    if (t > 0) {
      CHECK(diag(c, "printed_entries_scale") > 0.0);
      CHECK(diag(c, "printed_entries_residual") < 1e-12);
    }
  }
  CHECK(diag(i1_certificate(0.1), "projective_model_margin") > 0.0);
  const auto far = i1_certificate(0.3);
  CHECK_FALSE(far.valid);
  CHECK(far.failure.find("condition") != std::string::npos);
}

TEST_CASE("PPT test on Werner states") {
  const auto third = is_ppt_separable(werner(WernerParams(1.0 / 3.0)));
  CHECK(third.separable);
  CHECK(std::abs(third.margin) < 1e-12);
  const auto ent = is_ppt_separable(werner(WernerParams(0.4)));
  CHECK_FALSE(ent.separable);
  CHECK(std::abs(ent.margin - (1 - 3 * 0.4) / 4) < 1e-12);
  const auto mixed = is_ppt_separable(DensityMatrix(ComplexMatrix(ComplexMatrix::Identity(4, 4) / 4.0)));
  CHECK(mixed.separable);
  CHECK(std::abs(mixed.margin - 0.25) < 1e-15);
  CHECK_THROWS(is_ppt_separable(DensityMatrix(ComplexMatrix(ComplexMatrix::Identity(2, 2) / 2.0))));
}

TEST_CASE("tampered decompositions are rejected") {
  const auto good = lemma1_certificate(0.4, 0.3, 0.3, 0.35);
  REQUIRE(verify_decomposition(good).valid);

  SUBCASE("mixing weight") {
    auto t = good;
    t.q += 0.01;
    CHECK_FALSE(verify_decomposition(t).valid);
  }
  SUBCASE("remainder entry") {
    auto t = good;
    t.s(0, 0) -= 0.05;
    t.s(1, 1) += 0.05;
    CHECK_FALSE(verify_decomposition(t).valid);
  }
  SUBCASE("non-separable remainder") {
    auto t = i3_certificate(0.3, 0.74);
    // Replace by an entangled remainder with the right reconstruction target.
    t.s = werner(WernerParams(0.9)).matrix();
    CHECK_FALSE(verify_decomposition(t).valid);
  }
  SUBCASE("wrong reference kind") {
    auto t = good;
    t.reference.kind = ReferenceKind::Werner512;
    CHECK_FALSE(verify_decomposition(t).valid);
  }
}
