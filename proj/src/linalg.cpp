#include "hlc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hlc/error.hpp"

namespace hlc {

double max_asymmetry(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw DomainError("max_asymmetry: matrix is not square");
  double worst = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i; j < m.cols(); ++j)
      worst = std::max(worst, std::abs(m(i, j) - std::conj(m(j, i))));
  return worst;
}

bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    const Complex z = m.data()[k];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

HermitianMatrix::HermitianMatrix(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw DomainError("HermitianMatrix: expected a non-empty square matrix");
  if (!all_finite(m)) throw NumericalError("HermitianMatrix: non-finite entry");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = max_asymmetry(m);
  if (asym > tol * scale) {
    std::ostringstream os;
    os << "matrix is not Hermitian: max asymmetry " << asym << " exceeds " << tol * scale;
    throw NumericalError(os.str());
  }
  m_ = 0.5 * (m + m.adjoint());
}

HermitianMatrix HermitianMatrix::identity(int dim) {
  return HermitianMatrix(ComplexMatrix::Identity(dim, dim));
}

HermitianMatrix HermitianMatrix::zero(int dim) {
  return HermitianMatrix(ComplexMatrix::Zero(dim, dim));
}

HermitianMatrix HermitianMatrix::diagonal(const RealVector& d) {
  return HermitianMatrix(ComplexMatrix(d.cast<Complex>().asDiagonal()));
}

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& o) const {
  return HermitianMatrix(m_ + o.m_);
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& o) const {
  return HermitianMatrix(m_ - o.m_);
}

HermitianMatrix HermitianMatrix::operator*(double s) const { return HermitianMatrix(m_ * s); }

DensityMatrix::DensityMatrix(const HermitianMatrix& h, double declared_trace)
    : h_(h), trace_(declared_trace) {
  const double lmin = min_eigenvalue(h_);
  if (lmin < -kPsdTol) {
    std::ostringstream os;
    os << "DensityMatrix: not positive semidefinite (min eigenvalue " << lmin << ")";
    throw NumericalError(os.str());
  }
  if (std::abs(h_.trace() - declared_trace) > 1e-10) {
    std::ostringstream os;
    os << "DensityMatrix: declared trace " << declared_trace << " differs from computed "
       << h_.trace();
    throw NumericalError(os.str());
  }
}

DensityMatrix::DensityMatrix(const HermitianMatrix& h) : DensityMatrix(h, h.trace()) {}

DensityMatrix DensityMatrix::normalized() const {
  if (trace_ <= 1e-300) throw DomainError("cannot normalize an operator with zero trace");
  return DensityMatrix(HermitianMatrix(h_.matrix() / trace_), 1.0);
}

EigenDecomposition eig_hermitian(const HermitianMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m.matrix());
  if (es.info() != Eigen::Success) throw NumericalError("eig_hermitian: eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

EigenDecomposition eig_hermitian(const ComplexMatrix& m) { return eig_hermitian(HermitianMatrix(m)); }

double min_eigenvalue(const HermitianMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

HermitianMatrix clip_to_psd(const HermitianMatrix& m) {
  const auto e = eig_hermitian(m);
  const RealVector clipped = e.values.cwiseMax(0.0);
  return HermitianMatrix(e.vectors * clipped.cast<Complex>().asDiagonal() * e.vectors.adjoint());
}

SvdResult svd(const ComplexMatrix& m) {
  if (m.size() == 0) throw DomainError("svd: empty matrix");
  if (!all_finite(m)) throw NumericalError("svd: non-finite entry");
  Eigen::JacobiSVD<ComplexMatrix> js(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SvdResult r;
  r.u = js.matrixU();
  r.v = js.matrixV();
  r.singular_values = js.singularValues();
  r.d = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  for (Eigen::Index k = 0; k < r.singular_values.size(); ++k) r.d(k, k) = r.singular_values(k);
  return r;
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

namespace {

void check_factorable(const ComplexMatrix& m, int dim_a, int dim_b, const char* what) {
  if (dim_a <= 0 || dim_b <= 0 || m.rows() != m.cols() || m.rows() != dim_a * dim_b) {
    std::ostringstream os;
    os << what << ": a " << m.rows() << "x" << m.cols() << " matrix does not factor as " << dim_a
       << " x " << dim_b;
    throw DomainError(os.str());
  }
}

}  // namespace

ComplexMatrix partial_trace(const ComplexMatrix& m, Subsystem traced, int dim_a, int dim_b) {
  check_factorable(m, dim_a, dim_b, "partial_trace");
  if (traced == Subsystem::B) {
    ComplexMatrix out = ComplexMatrix::Zero(dim_a, dim_a);
    for (int i = 0; i < dim_a; ++i)
      for (int j = 0; j < dim_a; ++j)
        for (int k = 0; k < dim_b; ++k) out(i, j) += m(i * dim_b + k, j * dim_b + k);
    return out;
  }
  ComplexMatrix out = ComplexMatrix::Zero(dim_b, dim_b);
  for (int i = 0; i < dim_b; ++i)
    for (int j = 0; j < dim_b; ++j)
      for (int k = 0; k < dim_a; ++k) out(i, j) += m(k * dim_b + i, k * dim_b + j);
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, Subsystem traced, int dim_a, int dim_b) {
  return DensityMatrix(HermitianMatrix(partial_trace(rho.matrix(), traced, dim_a, dim_b)),
                       rho.trace());
}

ComplexMatrix partial_transpose(const ComplexMatrix& m, Subsystem side, int dim_a, int dim_b) {
  check_factorable(m, dim_a, dim_b, "partial_transpose");
  ComplexMatrix out(m.rows(), m.cols());
  for (int a1 = 0; a1 < dim_a; ++a1)
    for (int b1 = 0; b1 < dim_b; ++b1)
      for (int a2 = 0; a2 < dim_a; ++a2)
        for (int b2 = 0; b2 < dim_b; ++b2) {
          const Complex v = m(a1 * dim_b + b1, a2 * dim_b + b2);
          if (side == Subsystem::B)
            out(a1 * dim_b + b2, a2 * dim_b + b1) = v;
          else
            out(a2 * dim_b + b1, a1 * dim_b + b2) = v;
        }
  return out;
}

HermitianMatrix partial_transpose(const HermitianMatrix& m, Subsystem side, int dim_a, int dim_b) {
  return HermitianMatrix(partial_transpose(m.matrix(), side, dim_a, dim_b));
}

double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).norm(); }

double max_abs_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

const ComplexMatrix& pauli_x() {
  static const ComplexMatrix m = (ComplexMatrix(2, 2) << 0, 1, 1, 0).finished();
  return m;
}

const ComplexMatrix& pauli_y() {
  static const ComplexMatrix m =
      (ComplexMatrix(2, 2) << 0, Complex(0, -1), Complex(0, 1), 0).finished();
  return m;
}

const ComplexMatrix& pauli_z() {
  static const ComplexMatrix m = (ComplexMatrix(2, 2) << 1, 0, 0, -1).finished();
  return m;
}

const ComplexMatrix& identity2() {
  static const ComplexMatrix m = ComplexMatrix::Identity(2, 2);
  return m;
}

ComplexMatrix bloch_operator(double weight, const Eigen::Vector3d& r) {
  return 0.5 * weight * (identity2() + r.x() * pauli_x() + r.y() * pauli_y() + r.z() * pauli_z());
}

}  // namespace hlc
