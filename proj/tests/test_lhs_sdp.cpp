#include "doctest.h"

#include <cmath>

#include "hlc/error.hpp"
#include "hlc/lhs_sdp.hpp"
#include "hlc/states.hpp"

using namespace hlc;

namespace {

const MeasurementSet& ico() {
  static const MeasurementSet ms = icosahedron_set();
  return ms;
}

LhsSdpCertificate solve(double theta, double eta, double p = 0.0, SdpMode mode = SdpMode::Direct) {
  LhsSdpOptions o;
  o.mode = mode;
  return solve_protocol1(theta, eta, p, ico(), o);
}

}  // namespace

TEST_CASE("hermitian basis is orthogonal and spans") {
  const auto b = hermitian_basis(4);
  REQUIRE(b.size() == 16);
  for (std::size_t i = 0; i < b.size(); ++i) {
    CHECK(max_abs_distance(b[i], b[i].adjoint()) == 0.0);
    for (std::size_t k = i + 1; k < b.size(); ++k) CHECK(std::abs((b[i] * b[k]).trace()) < 1e-15);
  }
}

TEST_CASE("problem layout") {
  const auto sp = build_protocol1(0.4, 0.66, 0.0, ico());
  CHECK(sp.layout.num_strategies == 64);
  CHECK(sp.layout.num_vars == 16 + 64 * 4 + 1);
  CHECK(sp.conic.num_vars == sp.layout.num_vars);
  CHECK(sp.conic.eq_matrix.rows() == 48);
  CHECK_NOTHROW(sp.conic.validate());
  CHECK_THROWS_AS(build_protocol1(0.0, 0.66, 0.0, ico()), DomainError);
  CHECK_THROWS_AS(build_protocol1(0.4, 1.5, 0.0, ico()), DomainError);
  CHECK_THROWS_AS(build_protocol1(0.4, 0.66, -0.1, ico()), DomainError);
}

// Reference optima from an independent conic solver on the same problem.
TEST_CASE("optimal visibilities match frozen reference values") {
  struct Case {
    double theta, eta, p, q;
  };
  const Case cases[] = {{kQuarterPi, 0.66, 0.0, 0.355967},
                        {0.7365, 0.66, 0.0, 0.356219},
                        {0.1, 0.66, 0.0, 0.333914},
                        {0.4, 0.66, 0.0, 0.346057},
                        {0.4, 0.66, 0.5, 0.417690}};
  for (const auto& c : cases) {
    CAPTURE(c.theta);
    CAPTURE(c.p);
    const auto cert = solve(c.theta, c.eta, c.p);
    CHECK(std::abs(cert.q_certified - c.q) < 1e-4);
    CHECK(cert.q_certified <= cert.q_solver + 1e-12);
    const auto rep = verify_certificate(cert, ico());
    CHECK(rep.valid);
    CHECK(rep.certified);
  }
}

TEST_CASE("small eta collapses to the separability threshold") {
  // rho(q, theta) is PPT exactly for q <= 1/3, independent of theta.
  for (double eta : {0.5, 0.6}) {
    const auto cert = solve(0.3, eta);
    CHECK(std::abs(cert.q_certified - 1.0 / 3.0) < 1e-5);
  }
}

TEST_CASE("optimum is monotone in eta") {
  double prev = 0.0;
  for (double eta : {0.5, 0.6, 0.66}) {
    const double q = solve(0.6, eta).q_certified;
    CHECK(q >= prev - 1e-7);
    prev = q;
  }
}

TEST_CASE("bisection agrees with direct maximization") {
  for (double theta : {0.12, 0.25, 0.4, 0.55, 0.7}) {
    CAPTURE(theta);
    const auto d = solve(theta, 0.66);
    const auto b = solve(theta, 0.66, 0.0, SdpMode::Bisection);
    CHECK(std::abs(d.q_certified - b.q_certified) < 1e-4);
    CHECK(verify_certificate(b, ico()).valid);
  }
}

TEST_CASE("feasible set is convex: midpoint of two certificates verifies") {
  const auto a = solve(0.5, 0.66);
  const auto b = solve(0.5, 0.66, 0.0, SdpMode::Bisection);
  LhsSdpCertificate m = a;
  m.q_certified = (a.q_certified + b.q_certified) / 2;
  m.chi = (a.chi + b.chi) / 2.0;
  REQUIRE(a.strategies == b.strategies);
  for (std::size_t i = 0; i < m.sigma.size(); ++i) m.sigma[i] = (a.sigma[i] + b.sigma[i]) / 2.0;
  CHECK(verify_certificate(m, ico()).valid);
}

TEST_CASE("assemblage reproduces the marginal equalities") {
  const auto c = solve(0.3, 0.66);
  const auto as = assemblage(c, ico());
  REQUIRE(as.size() == 6);
  for (std::size_t x = 0; x < 6; ++x) {
    const ComplexMatrix sum = as[x][0] + as[x][1];
    ComplexMatrix rho_b = ComplexMatrix::Zero(2, 2);
    for (const auto& s : c.sigma) rho_b += s;
    CHECK(max_abs_distance(sum, rho_b) < 1e-12);
  }
  const ComplexMatrix r = remainder(c);
  CHECK(min_eigenvalue(HermitianMatrix(r, 1e-10)) > -1e-10);
}

TEST_CASE("tampered certificates are rejected") {
  const auto good = solve(0.45, 0.66);
  REQUIRE(verify_certificate(good, ico()).valid);

  SUBCASE("visibility raised by 0.05") {
    auto t = good;
    t.q_certified += 0.05;
    const auto rep = verify_certificate(t, ico());
    CHECK_FALSE(rep.valid);
  }
  SUBCASE("hidden state with a negative eigenvalue") {
    auto t = good;
    // Shift one sigma along its lowest eigenvector to eigenvalue -0.01.
    const auto e = eig_hermitian(HermitianMatrix(t.sigma[0], 1e-10));
    const ComplexMatrix v = e.vectors.col(0);
    t.sigma[0] -= (e.values(0) + 0.01) * v * v.adjoint();
    const auto rep = verify_certificate(t, ico());
    CHECK_FALSE(rep.valid);
    CHECK(rep.first_failure() != nullptr);
  }
  SUBCASE("eta above the published bound") {
    auto t = good;
    t.eta = 0.7;
    CHECK_FALSE(verify_certificate(t, ico()).valid);
  }
  SUBCASE("different measurement set") {
    std::vector<Povm> z{Povm::projective(Eigen::Vector3d(0, 0, 1), "z")};
    CHECK_FALSE(verify_certificate(good, MeasurementSet(z, "z-only")).valid);
  }
}

TEST_CASE("eta outside the table needs an explicit bound") {
  CHECK_THROWS_AS(solve_protocol1(0.4, 0.66, 0.55, ico()), DomainError);
  CHECK_THROWS_AS(solve_protocol1(0.4, 0.7, 0.0, ico()), DomainError);
  LhsSdpOptions o;
  o.eta_bound = 0.66;
  const auto c = solve_protocol1(0.4, 0.66, 0.55, ico(), o);
  const auto rep = verify_certificate(c, ico());
  CHECK(rep.valid);
  CHECK_FALSE(rep.certified);
}

TEST_CASE("strict chi variant") {
  LhsSdpOptions o;
  o.strict_chi = true;
  const auto c = solve_protocol1(0.4, 0.66, 0.0, ico(), o);
  CHECK(verify_certificate(c, ico()).valid);
  CHECK(c.q_certified <= solve(0.4, 0.66).q_certified + 1e-6);
}
