#include "doctest.h"

#include <cmath>
#include <string>

#include "hlc/error.hpp"
#include "hlc/sweep.hpp"
#include "support.hpp"

using namespace hlc;

namespace {

SweepConfig small_config(int grid) {
  SweepConfig c;
  c.grid = grid;
  c.max_interp_loss = 0.0;
  c.i1_points = 3;
  c.i3_points = 5;
  c.threads = 2;
  return c;
}

const SweepResult& small_sweep() {
  static const SweepResult r = sweep(small_config(6));
  return r;
}

}  // namespace

TEST_CASE("configuration validation") {
  SweepConfig c;
  CHECK_NOTHROW(c.validate());
  c.theta_s = 0.8;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = SweepConfig{};
  c.p = 0.55;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c.eta_source = EtaSource::Computed;
  CHECK_NOTHROW(c.validate());
  CHECK(SweepConfig{}.hash() == SweepConfig{}.hash());
  CHECK(SweepConfig{}.hash() != small_config(6).hash());
}

TEST_CASE("uniform grid") {
  const auto g = uniform_grid(0.1, 0.7365, 32);
  REQUIRE(g.size() == 32);
  CHECK(g.front() == 0.1);
  CHECK(g.back() == 0.7365);
  CHECK(uniform_grid(0.2, 0.3, 1) == std::vector<double>{0.2});
  CHECK(uniform_grid(0.2, 0.3, 0).empty());
}

TEST_CASE("Werner-mixture interval follows the closed form") {
  SweepConfig c = small_config(0);
  c.enable_i1 = c.enable_i2 = false;
  c.i3_points = 25;
  const auto r = sweep(c);
  REQUIRE(r.records.size() == 25);
  for (const auto& rec : r.records) {
    CHECK(rec.technique == "I3");
    CHECK(std::abs(rec.alpha_certified - i3_alpha_bound(rec.theta)) < 1e-10);
  }
  CHECK(std::abs(*r.alpha_c - i3_alpha_bound(0.7365)) < 1e-10);
}

TEST_CASE("no intervals: header-only CSV") {
  SweepConfig c = small_config(0);
  c.enable_i1 = c.enable_i2 = c.enable_i3 = false;
  const auto r = sweep(c);
  CHECK(r.records.empty());
  CHECK_FALSE(r.alpha_c.has_value());
  CHECK(emit_csv(r) == "theta,alpha_certified,technique\n");
}

TEST_CASE("sweep invariants") {
  const auto& r = small_sweep();
  REQUIRE(r.alpha_c.has_value());
  for (const auto& rec : r.records) CHECK(*r.alpha_c <= rec.alpha_certified + 1e-15);
  const auto ms = icosahedron_set();
  for (const auto& c : r.sdp_certificates) CHECK(verify_certificate(c, ms).valid);
  for (const auto& d : r.decompositions) CHECK(verify_decomposition(d).valid);
  // alpha_c cannot exceed the Werner-mixture curve at theta_l.
  CHECK(*r.alpha_c <= i3_alpha_bound(0.7365) + 1e-12);

  // Inside one interpolation gap the pointwise guarantee never increases.
  const auto g = uniform_grid(0.1, 0.7365, 6);
  double prev = 1.0;
  for (int i = 1; i < 20; ++i) {
    const double t = g[2] + (g[3] - g[2]) * i / 20.0;
    const double v = *r.guarantee_at(t);
    CHECK(v <= prev + 1e-15);
    prev = v;
  }
  CHECK(r.guarantee_at(0.05).has_value());
  CHECK(r.guarantee_at(0.78).has_value());
}

TEST_CASE("coarse grids lose visibility, and the sweep reports it") {
  const auto coarse = sweep(small_config(2));
  CHECK(*coarse.alpha_c < *small_sweep().alpha_c);
  CHECK(*coarse.alpha_c < 0.3636);
}

TEST_CASE("adaptive refinement keeps the interpolation loss bounded") {
  SweepConfig c = small_config(4);
  c.enable_i1 = c.enable_i3 = false;
  c.theta_s = 0.3;
  c.theta_l = 0.5;
  c.max_interp_loss = 0.003;
  const auto r = sweep(c);
  CHECK_FALSE(r.refinement_capped);
  // Every Lemma-1 record sits within the loss budget of the SDP value it extends.
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    const auto& rec = r.records[i];
    if (rec.technique != "LEMMA1") continue;
    const auto& d = r.decompositions[static_cast<std::size_t>(rec.cert_index)];
    CHECK(d.reference.alpha - rec.alpha_certified <= 0.003 + 1e-12);
  }
}

TEST_CASE("output is deterministic and independent of the thread count") {
  SweepConfig a = small_config(4);
  a.threads = 1;
  SweepConfig b = a;
  b.threads = 3;
  const auto ra = sweep(a);
  const auto rb = sweep(b);
  CHECK(emit_csv(ra) == emit_csv(rb));
  CHECK(emit_csv(ra) == emit_csv(sweep(a)));
}

TEST_CASE("verdicts") {
  const auto& r = small_sweep();
  const ComplexMatrix id = identity2();

  SUBCASE("strongly entangled Werner state is not certified") {
    const auto v = verdict(0.8, id, id, r);
    CHECK(v.verdict == Verdict::Unknown);
    CHECK_FALSE(v.reason.empty());
  }
  SUBCASE("Werner state below 5/12 without filtering") {
    const auto v = verdict(0.4, id, id, r);
    CHECK(v.verdict == Verdict::UnsteerableAfterFiltering);
    CHECK(std::abs(v.theta - kQuarterPi) < 1e-12);
    REQUIRE_FALSE(v.chain.empty());
    bool cited = false;
    for (const auto& s : v.chain) cited = cited || s.find("[cited]") != std::string::npos;
    CHECK(cited);
  }
  SUBCASE("rank-1 filter") {
    ComplexMatrix f = ComplexMatrix::Zero(2, 2);
    f(0, 0) = 1.0;
    const auto v = verdict(0.9, f, id, r);
    CHECK(v.verdict == Verdict::UnsteerableAfterFiltering);
    CHECK_FALSE(v.chain.empty());
  }
  SUBCASE("annihilating filters") {
    ComplexMatrix fa = ComplexMatrix::Zero(2, 2), fb = ComplexMatrix::Zero(2, 2);
    fa(0, 0) = 1.0;
    fb(1, 0) = 1.0;  // still leaves weight on |00>
    CHECK_NOTHROW(verdict(0.3, fa, fb, r));
    CHECK_THROWS_AS(verdict(0.3, ComplexMatrix::Zero(2, 2), id, r), DomainError);
  }
  SUBCASE("random filters below the certified level") {
    std::mt19937_64 rng(99);
    const double alpha = *r.alpha_c - 1e-6;
    for (int i = 0; i < 20; ++i) {
      const auto v = verdict(alpha, hlc_test::random_filter(rng, 2 + i % 3, 0.8), hlc_test::random_filter(rng, 2, 0.8), r);
      CHECK(v.verdict == Verdict::UnsteerableAfterFiltering);
      CHECK_FALSE(v.chain.empty());
    }
  }
}
