#include "doctest.h"

#include <cmath>
#include <set>

#include "hlc/error.hpp"
#include "hlc/measurements.hpp"

using namespace hlc;

TEST_CASE("icosahedron geometry") {
  const auto v = icosahedron_vertices();
  REQUIRE(v.size() == 12);
  const double inv_sqrt5 = 1.0 / std::sqrt(5.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    CHECK(std::abs(v[i].norm() - 1.0) < 1e-15);
    for (std::size_t k = i + 1; k < v.size(); ++k) {
      // Vertex pairs of the regular icosahedron subtend cos = +-1/sqrt5 or -1.
      const double d = v[i].dot(v[k]);
      const bool ok = std::abs(std::abs(d) - inv_sqrt5) < 1e-14 || std::abs(d + 1.0) < 1e-14;
      CHECK(ok);
    }
  }
  const auto up = icosahedron_upper_vertices();
  REQUIRE(up.size() == 6);
  for (std::size_t i = 0; i < up.size(); ++i)
    for (std::size_t k = i + 1; k < up.size(); ++k) CHECK(std::abs(up[i].dot(up[k]) + 1.0) > 1e-6);
}

TEST_CASE("icosahedron set, relabelled family and strategies") {
  const auto ms = icosahedron_set();
  CHECK(ms.size() == 6);
  CHECK(ms.id() == "icosahedron");
  for (const auto& m : ms.povms()) CHECK(m.outcomes() == 2);
  CHECK(relabeled_family(ms).size() == 76);
  CHECK(strategy_count(ms) == 64);
  const auto s = enumerate_strategies(ms);
  REQUIRE(s.size() == 64);
  std::set<std::vector<std::size_t>> distinct;
  for (const auto& st : s) distinct.insert(st.outcome);
  CHECK(distinct.size() == 64);
  CHECK(s[5].response(0, s[5].outcome[0]) == 1.0);
}

TEST_CASE("povm validation") {
  std::vector<HermitianMatrix> bad{HermitianMatrix(identity2() * 0.5), HermitianMatrix(identity2() * 0.4)};
  CHECK_THROWS_AS(Povm(bad, "bad"), NumericalError);
  const auto p = Povm::projective(Eigen::Vector3d(0, 0, 1), "z").padded(4);
  CHECK(p.outcomes() == 4);
  CHECK(p.nonzero_outcomes().size() == 2);
}

TEST_CASE("shrinking map keeps a POVM and moves toward xi") {
  const auto z = Povm::projective(Eigen::Vector3d(0, 0, 1), "z");
  const auto s = shrink_povm(z, ShrinkConfig(0.5, 0.6));
  const ComplexMatrix sum = s.element(0).matrix() + s.element(1).matrix();
  CHECK(max_abs_distance(sum, identity2()) < 1e-14);
  // 0.6 |0><0| + 0.4 Tr(xi |0><0|) 1 with Tr(xi |0><0|) = 0.75
  CHECK(std::abs(s.element(0).matrix()(0, 0).real() - (0.6 + 0.4 * 0.75)) < 1e-14);
  CHECK(std::abs(s.element(0).matrix()(1, 1).real() - 0.4 * 0.75) < 1e-14);
  CHECK(max_abs_distance(xi_state(0.0).matrix(), identity2() / 2.0) < 1e-15);
}

TEST_CASE("membership in the relabelled family") {
  const auto family = relabeled_family(icosahedron_set());
  const auto set = icosahedron_set();
  const auto r = membership_lp(set[2].padded(4), family);
  CHECK(r.feasible);
  CHECK(r.residual < 1e-9);

  const auto z = Povm::projective(Eigen::Vector3d(0, 0, 1), "z");
  CHECK_FALSE(membership_lp(z, family).feasible);
  CHECK(membership_lp(shrink_povm(z, ShrinkConfig(0.0, 0.6)), family).feasible);

  const double e = max_feasible_eta(z, family, 0.0);
  CHECK(e > 0.66);
  CHECK(e < 1.0);
  CHECK(membership_lp(shrink_povm(z, ShrinkConfig(0.0, e)), family).feasible);
}

TEST_CASE("rank-one POVM completion") {
  const double k = 1.0 / std::sqrt(3.0);
  std::vector<Eigen::Vector3d> tetra{{k, k, k}, {k, -k, -k}, {-k, k, -k}, {-k, -k, k}};
  const auto p = rank_one_povm(tetra);
  REQUIRE(p.has_value());
  for (const auto& e : p->elements()) CHECK(std::abs(e.trace() - 0.5) < 1e-10);
  std::vector<Eigen::Vector3d> cap{{0, 0, 1}, {0.1, 0, 0.99}, {0, 0.1, 0.99}};
  CHECK_FALSE(rank_one_povm(cap).has_value());
}

TEST_CASE("published shrinking table lookup") {
  CHECK(published_shrinking_factor(0.0).value() == doctest::Approx(0.67));
  CHECK(published_shrinking_factor(0.5).value() == doctest::Approx(0.66));
  CHECK(published_shrinking_factor(0.9).value() == doctest::Approx(0.32));
  CHECK_FALSE(published_shrinking_factor(0.55).has_value());
  for (const auto& v : fibonacci_sphere(50)) CHECK(std::abs(v.norm() - 1.0) < 1e-14);
}

TEST_CASE("coarse shrinking estimate bounds the net minimum") {
  ShrinkNetOptions o;
  o.projective_points = 40;
  o.four_outcome_seeds = 20;
  o.refined_seeds = 1;
  const auto est = shrinking_factor_estimate(relabeled_family(icosahedron_set()), 0.0, 0.05, o);
  CHECK(est.eta_upper_bound > 0.6);
  CHECK(est.eta_upper_bound < 0.75);
  CHECK(est.eta_lower_estimate < est.eta_upper_bound);
  CHECK(est.povms_tested > 0);
}
