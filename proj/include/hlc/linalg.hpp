#pragma once

// Dense complex linear algebra for the small matrices used throughout the
// toolkit: qubit operators, two-qubit states and d x 2 filters.
//
// Basis order for composite systems is fixed to |00>, |01>, |10>, |11>
// (Alice is the most significant index), and every matrix index quoted in
// comments or tests refers to that order.

#include <complex>

#include <Eigen/Dense>

namespace hlc {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Entrywise asymmetry below which a matrix is silently symmetrized.
inline constexpr double kHermitianTol = 1e-12;
/// Uniform PSD tolerance on the smallest eigenvalue.
inline constexpr double kPsdTol = 1e-10;
/// Stricter PSD tolerance applied to polished certificates.
inline constexpr double kStrictPsdTol = 1e-12;

enum class Subsystem { A, B };

/// max_{ij} |M_ij - conj(M_ji)|; M must be square.
double max_asymmetry(const ComplexMatrix& m);

/// True when every entry is finite.
bool all_finite(const ComplexMatrix& m);

/// Complex matrix that is Hermitian up to kHermitianTol; stored exactly
/// Hermitian via (M + M^dagger)/2.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;

  /// Throws NumericalError when the asymmetry exceeds `tol` (scaled by the
  /// largest entry when that exceeds one) or when an entry is not finite.
  explicit HermitianMatrix(const ComplexMatrix& m, double tol = kHermitianTol);

  static HermitianMatrix identity(int dim);
  static HermitianMatrix zero(int dim);
  static HermitianMatrix diagonal(const RealVector& d);

  int dim() const { return static_cast<int>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }
  Complex operator()(int i, int j) const { return m_(i, j); }
  double trace() const { return m_.trace().real(); }

  HermitianMatrix operator+(const HermitianMatrix& o) const;
  HermitianMatrix operator-(const HermitianMatrix& o) const;
  HermitianMatrix operator*(double s) const;
  friend HermitianMatrix operator*(double s, const HermitianMatrix& h) { return h * s; }

 private:
  ComplexMatrix m_;
};

/// Positive semidefinite Hermitian matrix with an explicitly tracked trace.
/// Subnormalized objects (assemblage members, hidden states) use the same
/// type with their own trace.
class DensityMatrix {
 public:
  DensityMatrix() = default;

  /// Validates min eigenvalue >= -kPsdTol and |trace - declared| <= 1e-10.
  DensityMatrix(const HermitianMatrix& h, double declared_trace);

  /// Declared trace taken from the matrix itself.
  explicit DensityMatrix(const HermitianMatrix& h);
  explicit DensityMatrix(const ComplexMatrix& m) : DensityMatrix(HermitianMatrix(m)) {}

  int dim() const { return h_.dim(); }
  double trace() const { return trace_; }
  const HermitianMatrix& hermitian() const { return h_; }
  const ComplexMatrix& matrix() const { return h_.matrix(); }
  Complex operator()(int i, int j) const { return h_(i, j); }

  /// Copy rescaled to unit trace; throws DomainError when the trace vanishes.
  DensityMatrix normalized() const;

 private:
  HermitianMatrix h_;
  double trace_ = 0.0;
};

struct EigenDecomposition {
  RealVector values;     ///< ascending
  ComplexMatrix vectors; ///< columns are the eigenvectors
};

EigenDecomposition eig_hermitian(const HermitianMatrix& m);

/// Validating overload: rejects input whose asymmetry exceeds kHermitianTol,
/// quoting the measured asymmetry.
EigenDecomposition eig_hermitian(const ComplexMatrix& m);

double min_eigenvalue(const HermitianMatrix& m);

/// Projection onto the PSD cone by clipping negative eigenvalues at zero.
HermitianMatrix clip_to_psd(const HermitianMatrix& m);

struct SvdResult {
  ComplexMatrix u;           ///< rows x rows unitary
  RealVector singular_values;///< descending, length min(rows, cols)
  Eigen::MatrixXd d;         ///< rows x cols, singular values on the diagonal
  ComplexMatrix v;           ///< cols x cols unitary
};

/// Full singular value decomposition M = U D V^dagger.
SvdResult svd(const ComplexMatrix& m);

/// Kronecker product in the global basis order.
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);

/// Partial trace over `traced` of an operator on C^{dim_a} (x) C^{dim_b}.
ComplexMatrix partial_trace(const ComplexMatrix& m, Subsystem traced, int dim_a, int dim_b);
DensityMatrix partial_trace(const DensityMatrix& rho, Subsystem traced, int dim_a = 2, int dim_b = 2);

/// Partial transpose on `side` of an operator on C^{dim_a} (x) C^{dim_b}.
ComplexMatrix partial_transpose(const ComplexMatrix& m, Subsystem side, int dim_a = 2, int dim_b = 2);
HermitianMatrix partial_transpose(const HermitianMatrix& m, Subsystem side = Subsystem::B,
                                  int dim_a = 2, int dim_b = 2);

/// Frobenius norm of a - b.
double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b);

/// Largest entrywise modulus of a - b.
double max_abs_distance(const ComplexMatrix& a, const ComplexMatrix& b);

/// Pauli matrices and the 2x2 identity.
const ComplexMatrix& pauli_x();
const ComplexMatrix& pauli_y();
const ComplexMatrix& pauli_z();
const ComplexMatrix& identity2();

/// (w/2)(1 + r.sigma) for a Bloch vector r.
ComplexMatrix bloch_operator(double weight, const Eigen::Vector3d& r);

}  // namespace hlc
