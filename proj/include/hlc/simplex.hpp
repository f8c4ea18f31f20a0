#pragma once

// Small dense simplex method for feasibility of {x >= 0 : A x = b}. Used
// for POVM membership in the convex hull of a finite measurement family.

#include <Eigen/Dense>

namespace hlc {

enum class LpStatus { Feasible, Infeasible, IterationLimit };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd x;          ///< valid when status == Feasible
  double infeasibility = 0.0; ///< phase-one objective at termination
  int pivots = 0;
};

/// Phase-one simplex with Bland's rule. Declares feasibility when the sum of
/// artificial variables drops below `tol` times the scale of b.
LpResult find_nonnegative_solution(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                   double tol = 1e-11);

}  // namespace hlc
