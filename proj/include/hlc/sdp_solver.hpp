#pragma once

// Small dense conic solver for problems of the form
//
//   maximize  c^T x
//   subject to E x = f,
//              F_b(x) = F_b0 + sum_i x_i F_bi  is PSD for every block b,
//
// with x real and every F_b Hermitian. Complex blocks are handled through the
// real embedding [[Re F, -Im F], [Im F, Re F]], which preserves semidefiniteness.

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "hlc/linalg.hpp"

namespace hlc {

struct LmiBlock {
  std::string name;
  ComplexMatrix constant;                          ///< F_b0
  std::vector<std::pair<int, ComplexMatrix>> terms;///< (variable index, F_bi)

  int dim() const { return static_cast<int>(constant.rows()); }
};

struct ConicProblem {
  int num_vars = 0;
  Eigen::VectorXd objective;   ///< maximized
  Eigen::MatrixXd eq_matrix;   ///< E, rows may be linearly dependent
  Eigen::VectorXd eq_rhs;      ///< f
  std::vector<LmiBlock> blocks;

  /// F_b(x).
  ComplexMatrix evaluate_block(std::size_t b, const Eigen::VectorXd& x) const;

  /// Throws DomainError on inconsistent dimensions or non-Hermitian data.
  void validate() const;
};

struct SolverOptions {
  double gap_tol = 1e-9;   ///< relative duality gap
  double feas_tol = 1e-9;  ///< relative primal / dual residual
  int max_iterations = 120;
  double initial_scale = 10.0;
  bool verbose = false;
};

/// NearOptimal: strict tolerances were not met, but the best iterate is within
/// 1000x of every tolerance. Callers that verify their answer may accept it.
enum class SolveStatus { Optimal, NearOptimal, Infeasible, IterationLimit, NumericalFailure };

inline bool usable(SolveStatus s) { return s == SolveStatus::Optimal || s == SolveStatus::NearOptimal; }

const char* to_string(SolveStatus s);

struct ConicSolution {
  SolveStatus status = SolveStatus::NumericalFailure;
  Eigen::VectorXd x;
  double objective = 0.0;
  double relative_gap = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
};

/// Pluggable backend so an external conic solver can replace the built-in one.
class ConicBackend {
 public:
  virtual ~ConicBackend() = default;
  virtual std::string name() const = 0;
  virtual ConicSolution solve(const ConicProblem& problem, const SolverOptions& opts) const = 0;
};

/// Infeasible-start primal-dual path following (HKM direction, Mehrotra
/// predictor-corrector). Equality constraints are reduced to an orthonormal
/// row basis and kept as a KKT block.
class InteriorPointBackend final : public ConicBackend {
 public:
  std::string name() const override { return "builtin-ipm-hkm"; }
  ConicSolution solve(const ConicProblem& problem, const SolverOptions& opts) const override;
};

std::shared_ptr<const ConicBackend> default_backend();

}  // namespace hlc
