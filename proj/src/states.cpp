#include "hlc/states.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hlc/error.hpp"

namespace hlc {

namespace {

constexpr double kRangeSlack = 1e-15;

double checked_unit(double v, const char* name) {
  if (!(v >= -kRangeSlack && v <= 1.0 + kRangeSlack)) {
    std::ostringstream os;
    os << name << " = " << v << " outside [0, 1]";
    throw DomainError(os.str());
  }
  return std::clamp(v, 0.0, 1.0);
}

}  // namespace

WernerParams::WernerParams(double alpha) : alpha_(checked_unit(alpha, "alpha")) {}

CanonicalParams::CanonicalParams(double alpha, double theta)
    : alpha_(checked_unit(alpha, "alpha")), theta_(theta) {
  if (!(theta >= -kRangeSlack && theta <= kQuarterPi + 1e-12)) {
    std::ostringstream os;
    os << "theta = " << theta << " outside [0, pi/4]";
    throw DomainError(os.str());
  }
  theta_ = std::clamp(theta, 0.0, kQuarterPi);
}

double fold_theta(double theta) {
  if (!std::isfinite(theta)) throw DomainError("theta is not finite");
  const double half_pi = std::numbers::pi / 2.0;
  double t = std::fmod(std::abs(theta), half_pi);
  if (t > kQuarterPi) t = half_pi - t;
  return t;
}

CanonicalParams CanonicalParams::folded(double alpha, double theta) {
  return CanonicalParams(alpha, fold_theta(theta));
}

FilterPair::FilterPair(ComplexMatrix f_a, ComplexMatrix f_b)
    : f_a_(std::move(f_a)), f_b_(std::move(f_b)) {
  for (const ComplexMatrix* f : {&f_a_, &f_b_}) {
    if (f->cols() != 2 || f->rows() < 1)
      throw DomainError("filters must be d x 2 matrices acting on a qubit");
    const double smax = svd(*f).singular_values(0);
    if (smax > 1.0 + 1e-10) {
      std::ostringstream os;
      os << "filter has singular value " << smax << " > 1: no completing Kraus operator exists";
      throw DomainError(os.str());
    }
  }
}

ComplexVector psi_theta(double theta) {
  ComplexVector v = ComplexVector::Zero(4);
  v(0) = std::cos(theta);
  v(3) = std::sin(theta);
  return v;
}

DensityMatrix werner(const WernerParams& p) {
  ComplexVector phi = ComplexVector::Zero(4);
  phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
  const ComplexMatrix m =
      p.alpha() * phi * phi.adjoint() + (1.0 - p.alpha()) * ComplexMatrix::Identity(4, 4) / 4.0;
  return DensityMatrix(HermitianMatrix(m), 1.0);
}

ComplexMatrix canonical_matrix(double alpha, double theta) {
  const ComplexVector psi = psi_theta(theta);
  const double c = std::cos(theta), s = std::sin(theta);
  ComplexMatrix rho_a = ComplexMatrix::Zero(2, 2);
  rho_a(0, 0) = c * c;
  rho_a(1, 1) = s * s;
  return alpha * psi * psi.adjoint() + (1.0 - alpha) * tensor(rho_a, identity2() / 2.0);
}

DensityMatrix canonical_state(const CanonicalParams& p) {
  return DensityMatrix(HermitianMatrix(canonical_matrix(p.alpha(), p.theta())), 1.0);
}

FilteredState apply_filters(const DensityMatrix& rho, const FilterPair& f) {
  if (rho.dim() != 4) throw DomainError("apply_filters: expected a two-qubit state");
  const ComplexMatrix k = tensor(f.f_a(), f.f_b());
  const ComplexMatrix out = k * rho.matrix() * k.adjoint();
  const double p = out.trace().real();
  if (!(p >= 1e-12)) {
    std::ostringstream os;
    os << "filter annihilates state (success probability " << p << ")";
    throw DomainError(os.str());
  }
  return {DensityMatrix(HermitianMatrix(out / p), 1.0), p / rho.trace()};
}

NormalForm filter_normal_form(const ComplexMatrix& f_a, double alpha) {
  if (f_a.cols() != 2 || f_a.rows() < 1)
    throw DomainError("filter_normal_form: F_A must be a d x 2 matrix");
  const SvdResult s = svd(f_a);
  const double s1 = s.singular_values(0);
  const double s2 = s.singular_values.size() > 1 ? s.singular_values(1) : 0.0;
  if (!(s1 > 1e-150)) throw DomainError("filter_normal_form: F_A has rank 0");

  NormalForm nf;
  nf.singular_values = s.singular_values;
  nf.separable_output = s2 <= 1e-12 * s1;
  const double theta = nf.separable_output ? 0.0 : std::atan2(s2, s1);
  nf.params = CanonicalParams(alpha, theta);
  nf.u_a = s.u;
  // Werner states satisfy (V^dagger (x) V^T) rho_W (V (x) V^*) = rho_W, so the
  // right singular frame moves to Bob as V^*.
  nf.u_b = s.v.conjugate();
  nf.normalization = (s1 * s1 + s2 * s2) / 2.0;
  return nf;
}

ComplexMatrix normal_form_state(const NormalForm& nf) {
  const Eigen::Index d = nf.u_a.rows();
  const ComplexMatrix canon = canonical_matrix(nf.params.alpha(), nf.params.theta());
  ComplexMatrix embedded = ComplexMatrix::Zero(2 * d, 2 * d);
  // Alice's levels 0 and 1 carry the qubit support; index = a * 2 + b.
  for (int a1 = 0; a1 < 2 && a1 < d; ++a1)
    for (int b1 = 0; b1 < 2; ++b1)
      for (int a2 = 0; a2 < 2 && a2 < d; ++a2)
        for (int b2 = 0; b2 < 2; ++b2)
          embedded(a1 * 2 + b1, a2 * 2 + b2) = canon(a1 * 2 + b1, a2 * 2 + b2);
  const ComplexMatrix u = tensor(nf.u_a, nf.u_b);
  return u * embedded * u.adjoint();
}

double eq18_margin(double beta, double theta) {
  if (!(beta > 0.0 && beta <= 1.0)) throw DomainError("eq18_margin: beta must lie in (0, 1]");
  const double c2 = std::cos(2.0 * theta);
  return c2 * c2 - (2.0 * beta - 1.0) / ((2.0 - beta) * beta * beta * beta);
}

DensityMatrix rho_theta(double beta, double theta) {
  const double margin = eq18_margin(beta, theta);
  if (margin < 0.0) {
    std::ostringstream os;
    os << "projective-model condition cos^2(2 theta) >= (2 beta - 1)/((2 - beta) beta^3) fails at beta="
       << beta << ", theta=" << theta << " (margin " << margin << ")";
    throw DomainError(os.str());
  }
  const ComplexMatrix rho = canonical_matrix(beta, theta);
  const ComplexMatrix rho_b = partial_trace(rho, Subsystem::A, 2, 2);
  ComplexMatrix ket0 = ComplexMatrix::Zero(2, 2);
  ket0(0, 0) = 1.0;
  return DensityMatrix(HermitianMatrix(0.5 * (rho + tensor(ket0, rho_b))), 1.0);
}

}  // namespace hlc
