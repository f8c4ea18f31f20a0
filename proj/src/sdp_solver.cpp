#include "hlc/sdp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>

#include "hlc/error.hpp"

namespace hlc {

ComplexMatrix ConicProblem::evaluate_block(std::size_t b, const Eigen::VectorXd& x) const {
  const LmiBlock& blk = blocks.at(b);
  ComplexMatrix out = blk.constant;
  for (const auto& [i, f] : blk.terms) out += x(i) * f;
  return out;
}

void ConicProblem::validate() const {
  if (num_vars <= 0) throw DomainError("ConicProblem: no variables");
  if (objective.size() != num_vars) throw DomainError("ConicProblem: objective size mismatch");
  if (eq_matrix.rows() != eq_rhs.size() || (eq_matrix.rows() > 0 && eq_matrix.cols() != num_vars))
    throw DomainError("ConicProblem: equality block has inconsistent dimensions");
  if (blocks.empty()) throw DomainError("ConicProblem: no cone constraints");
  for (const auto& b : blocks) {
    if (b.constant.rows() != b.constant.cols() || b.constant.rows() == 0)
      throw DomainError("ConicProblem: block '" + b.name + "' is not square");
    if (max_asymmetry(b.constant) > 1e-12)
      throw DomainError("ConicProblem: block '" + b.name + "' constant is not Hermitian");
    for (const auto& [i, f] : b.terms) {
      if (i < 0 || i >= num_vars)
        throw DomainError("ConicProblem: block '" + b.name + "' references an unknown variable");
      if (f.rows() != b.constant.rows() || f.cols() != b.constant.cols())
        throw DomainError("ConicProblem: block '" + b.name + "' term has the wrong size");
      if (max_asymmetry(f) > 1e-12)
        throw DomainError("ConicProblem: block '" + b.name + "' term is not Hermitian");
    }
  }
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::NearOptimal: return "near_optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::IterationLimit: return "iteration_limit";
    case SolveStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Block in the solver's dual form: Z = C - sum_i y_i A_i.
struct RealBlock {
  int n = 0;
  MatrixXd c;
  std::vector<int> vars;
  MatrixXd g;  // vars.size() x n*n, row k = vec(A_{vars[k]})
};

bool is_real(const ComplexMatrix& m) { return m.imag().cwiseAbs().maxCoeff() == 0.0; }

MatrixXd embed(const ComplexMatrix& m, bool real) {
  if (real) return m.real();
  const Eigen::Index n = m.rows();
  MatrixXd out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = m.real();
  out.topRightCorner(n, n) = -m.imag();
  out.bottomLeftCorner(n, n) = m.imag();
  out.bottomRightCorner(n, n) = m.real();
  return out;
}

RealBlock make_block(const LmiBlock& src) {
  bool real = is_real(src.constant);
  for (const auto& t : src.terms) real = real && is_real(t.second);

  // Merge repeated variables.
  std::vector<std::pair<int, ComplexMatrix>> terms;
  for (const auto& [i, f] : src.terms) {
    auto it = std::find_if(terms.begin(), terms.end(), [&](const auto& t) { return t.first == i; });
    if (it == terms.end())
      terms.emplace_back(i, f);
    else
      it->second += f;
  }
  std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  RealBlock b;
  b.c = embed(src.constant, real);
  b.n = static_cast<int>(b.c.rows());
  b.g.resize(static_cast<Eigen::Index>(terms.size()), b.n * b.n);
  for (std::size_t k = 0; k < terms.size(); ++k) {
    b.vars.push_back(terms[k].first);
    const MatrixXd a = -embed(terms[k].second, real);
    b.g.row(static_cast<Eigen::Index>(k)) = Eigen::Map<const VectorXd>(a.data(), a.size());
  }
  return b;
}

MatrixXd adjoint_map(const RealBlock& b, const VectorXd& y) {
  VectorXd ys(static_cast<Eigen::Index>(b.vars.size()));
  for (std::size_t k = 0; k < b.vars.size(); ++k) ys(static_cast<Eigen::Index>(k)) = y(b.vars[k]);
  VectorXd v = b.g.transpose() * ys;
  return Eigen::Map<MatrixXd>(v.data(), b.n, b.n);
}

void accumulate_map(const RealBlock& b, const MatrixXd& x, VectorXd& out) {
  const VectorXd r = b.g * Eigen::Map<const VectorXd>(x.data(), x.size());
  for (std::size_t k = 0; k < b.vars.size(); ++k) out(b.vars[k]) += r(static_cast<Eigen::Index>(k));
}

double max_step(const MatrixXd& x, const MatrixXd& dx) {
  Eigen::LLT<MatrixXd> llt(x);
  if (llt.info() != Eigen::Success) return 0.0;
  const MatrixXd a = llt.matrixL().solve(dx);
  MatrixXd w = llt.matrixL().solve(a.transpose()).transpose();
  w = 0.5 * (w + w.transpose());
  const double lmin = Eigen::SelfAdjointEigenSolver<MatrixXd>(w, Eigen::EigenvaluesOnly).eigenvalues()(0);
  return lmin >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lmin;
}

double inner(const MatrixXd& a, const MatrixXd& b) { return a.cwiseProduct(b).sum(); }

struct Direction {
  std::vector<MatrixXd> dx, dz;
  VectorXd dy, dw;
};

}  // namespace

ConicSolution InteriorPointBackend::solve(const ConicProblem& problem, const SolverOptions& opts) const {
  problem.validate();
  const int n = problem.num_vars;
  const VectorXd& c = problem.objective;

  std::vector<RealBlock> blocks;
  blocks.reserve(problem.blocks.size());
  for (const auto& b : problem.blocks) blocks.push_back(make_block(b));

  ConicSolution sol;

  // Reduce equalities to orthonormal rows: E = V_r^T, f = S_r^{-1} U_r^T f0.
  MatrixXd e(0, n);
  VectorXd f(0);
  if (problem.eq_matrix.rows() > 0) {
    Eigen::JacobiSVD<MatrixXd> js(problem.eq_matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const VectorXd& sv = js.singularValues();
    const double thresh = 1e-10 * std::max(1.0, sv(0));
    Eigen::Index r = 0;
    while (r < sv.size() && sv(r) > thresh) ++r;
    e = js.matrixV().leftCols(r).transpose();
    f = (js.matrixU().leftCols(r).transpose() * problem.eq_rhs).cwiseQuotient(sv.head(r));
    const VectorXd y_ls = e.transpose() * f;
    const double inconsistency = (problem.eq_matrix * y_ls - problem.eq_rhs).norm();
    if (inconsistency > 1e-9 * (1.0 + problem.eq_rhs.norm())) {
      sol.status = SolveStatus::Infeasible;
      return sol;
    }
  }
  const Eigen::Index r = e.rows();

  int total_dim = 0;
  double norm_c_data = 0.0;
  for (const auto& b : blocks) {
    total_dim += b.n;
    norm_c_data += b.c.squaredNorm();
  }
  const double scale_primal = 1.0 + c.norm();
  const double scale_dual = 1.0 + std::sqrt(norm_c_data) + f.norm();

  std::vector<MatrixXd> x, z;
  for (const auto& b : blocks) {
    x.push_back(opts.initial_scale * MatrixXd::Identity(b.n, b.n));
    z.push_back(opts.initial_scale * MatrixXd::Identity(b.n, b.n));
  }
  VectorXd y = VectorXd::Zero(n);
  VectorXd w = VectorXd::Zero(r);

  // Best iterate seen, scored by the worst tolerance ratio; returned as
  // NearOptimal when the run ends without meeting the strict tolerances.
  ConicSolution best;
  double best_score = std::numeric_limits<double>::infinity();
  int since_best = 0;
  auto finish = [&](SolveStatus fallback) {
    if (best_score <= 1e3) {
      best.status = SolveStatus::NearOptimal;
      return best;
    }
    sol.status = fallback;
    return sol;
  };

  for (int iter = 0; iter <= opts.max_iterations; ++iter) {
    // Residuals.
    VectorXd ax = VectorXd::Zero(n);
    for (std::size_t k = 0; k < blocks.size(); ++k) accumulate_map(blocks[k], x[k], ax);
    const VectorXd rp = c - ax - e.transpose() * w;
    std::vector<MatrixXd> rd(blocks.size());
    double rd_norm2 = 0.0, pobj = f.dot(w), gap = 0.0;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      rd[k] = blocks[k].c - adjoint_map(blocks[k], y) - z[k];
      rd_norm2 += rd[k].squaredNorm();
      pobj += inner(blocks[k].c, x[k]);
      gap += inner(x[k], z[k]);
    }
    const VectorXd rf = f - e * y;
    const double dobj = c.dot(y);
    const double mu = gap / total_dim;

    sol.iterations = iter;
    sol.x = y + e.transpose() * rf;  // exact on the equality subspace
    sol.objective = c.dot(sol.x);
    sol.relative_gap = std::max(gap, std::abs(pobj - dobj)) / (1.0 + std::abs(pobj) + std::abs(dobj));
    sol.primal_residual = rp.norm() / scale_primal;
    sol.dual_residual = std::sqrt(rd_norm2 + rf.squaredNorm()) / scale_dual;

    if (opts.verbose)
      std::cerr << "ipm " << iter << " pobj " << pobj << " dobj " << dobj << " gap " << sol.relative_gap
                << " pres " << sol.primal_residual << " dres " << sol.dual_residual << "\n";

    if (sol.relative_gap < opts.gap_tol && sol.primal_residual < opts.feas_tol &&
        sol.dual_residual < opts.feas_tol) {
      sol.status = SolveStatus::Optimal;
      return sol;
    }
    const double score = std::max({sol.relative_gap / opts.gap_tol, sol.primal_residual / opts.feas_tol,
                                   sol.dual_residual / opts.feas_tol});
    if (score < best_score) {
      best_score = score;
      best = sol;
      since_best = 0;
    } else if (++since_best >= 8 && best_score <= 1e3) {
      return finish(SolveStatus::NumericalFailure);  // stalled near the optimum
    }
    double xnorm = 0.0;
    for (const auto& xb : x) xnorm = std::max(xnorm, xb.cwiseAbs().maxCoeff());
    if (xnorm > 1e12) return finish(SolveStatus::Infeasible);  // (P) unbounded: no feasible x
    if (y.cwiseAbs().maxCoeff() > 1e12) return finish(SolveStatus::NumericalFailure);
    if (iter == opts.max_iterations) break;

    // Schur complement M_ij = sum_b Tr(A_i X A_j Z^{-1}).
    std::vector<MatrixXd> zinv(blocks.size());
    MatrixXd m = MatrixXd::Zero(n, n);
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      const RealBlock& b = blocks[k];
      Eigen::LLT<MatrixXd> llt(z[k]);
      if (llt.info() != Eigen::Success) return finish(SolveStatus::NumericalFailure);
      zinv[k] = llt.solve(MatrixXd::Identity(b.n, b.n));
      const Eigen::Index nv = static_cast<Eigen::Index>(b.vars.size());
      MatrixXd p(nv, b.n * b.n);
      for (Eigen::Index i = 0; i < nv; ++i) {
        const VectorXd gi = b.g.row(i).transpose();
        const MatrixXd pi = x[k] * Eigen::Map<const MatrixXd>(gi.data(), b.n, b.n) * zinv[k];
        p.row(i) = Eigen::Map<const VectorXd>(pi.data(), pi.size());
      }
      const MatrixXd msub = p * b.g.transpose();
      for (Eigen::Index i = 0; i < nv; ++i)
        for (Eigen::Index j = 0; j < nv; ++j) m(b.vars[i], b.vars[j]) += msub(i, j);
    }
    m = 0.5 * (m + m.transpose());
    const double gamma = std::max(1e-12, m.diagonal().mean());
    MatrixXd mreg = m + gamma * e.transpose() * e;
    Eigen::LLT<MatrixXd> mfac(mreg);
    if (mfac.info() != Eigen::Success) {
      mreg.diagonal().array() += 1e-12 * gamma;
      mfac.compute(mreg);
      if (mfac.info() != Eigen::Success) return finish(SolveStatus::NumericalFailure);
    }
    const MatrixXd minv_et = mfac.solve(e.transpose());
    const MatrixXd s = e * minv_et;
    Eigen::LLT<MatrixXd> sfac(s);
    if (r > 0 && sfac.info() != Eigen::Success) return finish(SolveStatus::NumericalFailure);

    auto direction = [&](double sigma, const std::vector<MatrixXd>* corr) {
      Direction d;
      VectorXd h = VectorXd::Zero(n);
      std::vector<MatrixXd> t(blocks.size());
      for (std::size_t k = 0; k < blocks.size(); ++k) {
        t[k] = sigma * mu * zinv[k] - x[k] - x[k] * rd[k] * zinv[k];
        if (corr) t[k] -= (*corr)[k];
        accumulate_map(blocks[k], t[k], h);
      }
      const VectorXd rhs = rp - h + gamma * e.transpose() * rf;
      const VectorXd u = mfac.solve(rhs);
      d.dw = r > 0 ? VectorXd(sfac.solve(e * u - rf)) : VectorXd(0);
      d.dy = r > 0 ? VectorXd(u - minv_et * d.dw) : u;
      for (std::size_t k = 0; k < blocks.size(); ++k) {
        MatrixXd dz = rd[k] - adjoint_map(blocks[k], d.dy);
        MatrixXd dx = t[k] + x[k] * adjoint_map(blocks[k], d.dy) * zinv[k];
        d.dx.push_back(0.5 * (dx + dx.transpose()));
        d.dz.push_back(0.5 * (dz + dz.transpose()));
      }
      return d;
    };
    auto step_lengths = [&](const Direction& d, double tau) {
      double ap = std::numeric_limits<double>::infinity(), ad = ap;
      for (std::size_t k = 0; k < blocks.size(); ++k) {
        ap = std::min(ap, max_step(x[k], d.dx[k]));
        ad = std::min(ad, max_step(z[k], d.dz[k]));
      }
      return std::make_pair(std::min(1.0, tau * ap), std::min(1.0, tau * ad));
    };

    const Direction pred = direction(0.0, nullptr);
    const auto [ap0, ad0] = step_lengths(pred, 1.0);
    double mu_aff = 0.0;
    for (std::size_t k = 0; k < blocks.size(); ++k)
      mu_aff += inner(x[k] + ap0 * pred.dx[k], z[k] + ad0 * pred.dz[k]);
    mu_aff /= total_dim;
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

    std::vector<MatrixXd> corr(blocks.size());
    for (std::size_t k = 0; k < blocks.size(); ++k) corr[k] = pred.dx[k] * pred.dz[k] * zinv[k];
    const Direction d = direction(sigma, &corr);
    const auto [ap, ad] = step_lengths(d, 0.95);
    if (ap <= 1e-14 && ad <= 1e-14) return finish(SolveStatus::NumericalFailure);

    for (std::size_t k = 0; k < blocks.size(); ++k) {
      x[k] += ap * d.dx[k];
      z[k] += ad * d.dz[k];
    }
    if (r > 0) w += ap * d.dw;
    y += ad * d.dy;
  }
  return finish(SolveStatus::IterationLimit);
}

std::shared_ptr<const ConicBackend> default_backend() {
  static const auto backend = std::make_shared<InteriorPointBackend>();
  return backend;
}

}  // namespace hlc
