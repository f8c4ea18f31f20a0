#include "hlc/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "hlc/error.hpp"

namespace hlc {

LpResult find_nonnegative_solution(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double tol) {
  const Eigen::Index m = a.rows(), n = a.cols();
  if (b.size() != m) throw DomainError("find_nonnegative_solution: dimension mismatch");

  // Tableau [A | I | b] with the phase-one cost row last.
  const Eigen::Index cols = n + m + 1;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, cols);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double sign = b(i) < 0.0 ? -1.0 : 1.0;
    t.row(i).head(n) = sign * a.row(i);
    t(i, n + i) = 1.0;
    t(i, cols - 1) = sign * b(i);
  }
  for (Eigen::Index i = 0; i < m; ++i) t.row(m) -= t.row(i);
  for (Eigen::Index i = 0; i < m; ++i) t(m, n + i) = 0.0;

  std::vector<Eigen::Index> basis(m);
  for (Eigen::Index i = 0; i < m; ++i) basis[i] = n + i;

  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  const double eps = 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff());
  LpResult res;
  const int max_pivots = 50 * static_cast<int>(m + n);

  while (true) {
    // Bland: lowest-index column with negative reduced cost.
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < n + m; ++j)
      if (t(m, j) < -eps) {
        enter = j;
        break;
      }
    if (enter < 0) break;

    Eigen::Index leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (t(i, enter) > eps) {
        const double ratio = t(i, cols - 1) / t(i, enter);
        if (ratio < best - 1e-15 || (std::abs(ratio - best) <= 1e-15 && leave >= 0 &&
                                     basis[i] < basis[leave])) {
          best = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) break;  // unbounded direction cannot occur in phase one

    t.row(leave) /= t(leave, enter);
    for (Eigen::Index i = 0; i <= m; ++i)
      if (i != leave && t(i, enter) != 0.0) t.row(i) -= t(i, enter) * t.row(leave);
    basis[leave] = enter;

    if (++res.pivots > max_pivots) {
      res.status = LpStatus::IterationLimit;
      return res;
    }
  }

  res.infeasibility = -t(m, cols - 1);
  res.x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i)
    if (basis[i] < n) res.x(basis[i]) = std::max(0.0, t(i, cols - 1));
  res.status = res.infeasibility <= tol * scale ? LpStatus::Feasible : LpStatus::Infeasible;
  return res;
}

}  // namespace hlc
