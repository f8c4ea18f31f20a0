#include "doctest.h"

#include "hlc/error.hpp"
#include "hlc/sdp_solver.hpp"
#include "support.hpp"

using namespace hlc;

namespace {

// maximize t subject to A - t 1 >= 0; the optimum is lambda_min(A).
ConicProblem min_eig_problem(const ComplexMatrix& a) {
  ConicProblem p;
  p.num_vars = 1;
  p.objective = Eigen::VectorXd::Ones(1);
  p.eq_matrix = Eigen::MatrixXd(0, 1);
  p.eq_rhs = Eigen::VectorXd(0);
  p.blocks.push_back({"A - t", a, {{0, -ComplexMatrix::Identity(a.rows(), a.rows())}}});
  return p;
}

}  // namespace

TEST_CASE("minimum eigenvalue of a complex Hermitian matrix") {
  std::mt19937_64 rng(3);
  const ComplexMatrix a = hlc_test::random_hermitian(rng, 4);
  // Oracle: bisection on the sign pattern of the characteristic polynomial.
  const auto c = hlc_test::charpoly(a);
  double lo = -20, hi = 20;
  auto f = [&](double x) { return hlc_test::eval_poly(c, x).real(); };
  // Smallest root: det(x - A) has sign (-1)^n below it.
  for (double x = -20; x < 20; x += 1e-3)
    if (f(x) * f(-20) <= 0) {
      lo = x - 1e-3;
      hi = x;
      break;
    }
  for (int i = 0; i < 80; ++i) {
    const double m = (lo + hi) / 2;
    (f(m) * f(lo) <= 0 ? hi : lo) = m;
  }
  const auto sol = InteriorPointBackend().solve(min_eig_problem(a), {});
  REQUIRE(usable(sol.status));
  CHECK(std::abs(sol.objective - lo) < 1e-7);
}

TEST_CASE("equality constraints with a redundant row") {
  // maximize x0 - x1 with x0 + x1 = 1 (stated twice), diag(x0, x1) >= 0: optimum 1.
  ConicProblem p;
  p.num_vars = 2;
  p.objective = Eigen::Vector2d(1, -1);
  p.eq_matrix = Eigen::MatrixXd(2, 2);
  p.eq_matrix << 1, 1, 2, 2;
  p.eq_rhs = Eigen::Vector2d(1, 2);
  ComplexMatrix e0 = ComplexMatrix::Zero(2, 2), e1 = ComplexMatrix::Zero(2, 2);
  e0(0, 0) = 1;
  e1(1, 1) = 1;
  p.blocks.push_back({"diag", ComplexMatrix::Zero(2, 2), {{0, e0}, {1, e1}}});
  const auto sol = InteriorPointBackend().solve(p, {});
  REQUIRE(usable(sol.status));
  CHECK(std::abs(sol.objective - 1.0) < 1e-7);
  CHECK(std::abs(sol.x(0) + sol.x(1) - 1.0) < 1e-10);
}

TEST_CASE("coupled 2x2 block") {
  // maximize 2 y subject to [[1, y], [y, 1]] >= 0: optimum y = 1.
  ConicProblem p;
  p.num_vars = 1;
  p.objective = Eigen::VectorXd::Constant(1, 2.0);
  p.eq_matrix = Eigen::MatrixXd(0, 1);
  p.eq_rhs = Eigen::VectorXd(0);
  ComplexMatrix off = ComplexMatrix::Zero(2, 2);
  off(0, 1) = off(1, 0) = 1;
  p.blocks.push_back({"lmi", ComplexMatrix::Identity(2, 2), {{0, off}}});
  const auto sol = InteriorPointBackend().solve(p, {});
  REQUIRE(usable(sol.status));
  CHECK(std::abs(sol.x(0) - 1.0) < 1e-6);
}

TEST_CASE("infeasible problem is not reported usable") {
  // x >= 1 and x <= 0.
  ConicProblem p;
  p.num_vars = 1;
  p.objective = Eigen::VectorXd::Ones(1);
  p.eq_matrix = Eigen::MatrixXd(0, 1);
  p.eq_rhs = Eigen::VectorXd(0);
  p.blocks.push_back({"x-1", -ComplexMatrix::Identity(1, 1), {{0, ComplexMatrix::Identity(1, 1)}}});
  p.blocks.push_back({"-x", ComplexMatrix::Zero(1, 1), {{0, -ComplexMatrix::Identity(1, 1)}}});
  const auto sol = InteriorPointBackend().solve(p, {});
  CHECK_FALSE(usable(sol.status));
}

TEST_CASE("problem validation") {
  ConicProblem p = min_eig_problem(ComplexMatrix::Identity(2, 2));
  p.blocks[0].terms[0].first = 3;
  CHECK_THROWS_AS(p.validate(), DomainError);
  CHECK(default_backend()->name() == "builtin-ipm-hkm");
}
