#pragma once

// State families: Werner states, the canonical one-side-filtered family
// rho(alpha, theta) = alpha |psi_theta><psi_theta| + (1 - alpha) rho_A (x) 1/2,
// the reference states used by the small-theta construction, and the
// reduction of an arbitrary filter on Alice's side to that canonical family.

#include <numbers>

#include "hlc/linalg.hpp"

namespace hlc {

inline constexpr double kQuarterPi = std::numbers::pi / 4.0;

class WernerParams {
 public:
  /// Throws DomainError unless alpha lies in [0, 1].
  explicit WernerParams(double alpha);
  double alpha() const { return alpha_; }

 private:
  double alpha_;
};

class CanonicalParams {
 public:
  /// Throws DomainError unless alpha in [0, 1] and theta in [0, pi/4].
  CanonicalParams(double alpha, double theta);

  /// Folds an arbitrary angle into [0, pi/4] using the local-unitary
  /// equivalences theta -> -theta and theta -> pi/2 - theta.
  static CanonicalParams folded(double alpha, double theta);

  double alpha() const { return alpha_; }
  double theta() const { return theta_; }

 private:
  double alpha_;
  double theta_;
};

/// Folds theta into [0, pi/4] (see CanonicalParams::folded).
double fold_theta(double theta);

/// Local filters on Alice's and Bob's qubit; each maps C^2 to C^d.
class FilterPair {
 public:
  /// Throws DomainError unless both filters have two columns and largest
  /// singular value <= 1 + 1e-10, so that a completing Kraus operator exists.
  FilterPair(ComplexMatrix f_a, ComplexMatrix f_b);

  const ComplexMatrix& f_a() const { return f_a_; }
  const ComplexMatrix& f_b() const { return f_b_; }

 private:
  ComplexMatrix f_a_;
  ComplexMatrix f_b_;
};

/// cos(theta)|00> + sin(theta)|11>.
ComplexVector psi_theta(double theta);

DensityMatrix werner(const WernerParams& p);
DensityMatrix canonical_state(const CanonicalParams& p);

/// Unchecked matrix of rho(alpha, theta); alpha may leave [0, 1] (used for
/// affine parameterizations inside the SDP).
ComplexMatrix canonical_matrix(double alpha, double theta);

struct FilteredState {
  DensityMatrix state;
  double success_prob = 0.0;
};

/// (F_A (x) F_B) rho (F_A (x) F_B)^dagger, normalized. rho must be a
/// two-qubit state. Throws DomainError when the success probability falls
/// below 1e-12.
FilteredState apply_filters(const DensityMatrix& rho, const FilterPair& f);

struct NormalForm {
  CanonicalParams params{0.0, 0.0};
  ComplexMatrix u_a;          ///< d x d unitary on Alice's output space
  ComplexMatrix u_b;          ///< 2 x 2 unitary on Bob's side
  RealVector singular_values; ///< descending
  double normalization = 0.0; ///< Tr(D^T D) / 2, the filter success probability
  bool separable_output = false;
};

/// Reduces a filter F_A (d x 2) applied to rho_W(alpha) to the canonical
/// family: the filtered state equals (U_A (x) U_B) rho(alpha, theta) (U_A (x) U_B)^dagger
/// with rho(alpha, theta) embedded in the first two levels of Alice's space.
/// Rank-1 filters yield theta = 0 with separable_output set; a zero filter
/// throws DomainError.
NormalForm filter_normal_form(const ComplexMatrix& f_a, double alpha);

/// The filtered state predicted by a normal form, as a (2d) x (2d) matrix.
ComplexMatrix normal_form_state(const NormalForm& nf);

/// cos^2(2 theta) - (2 beta - 1) / ((2 - beta) beta^3); nonnegative when the
/// projective-measurement LHS model is available for rho(beta, theta).
double eq18_margin(double beta, double theta);

/// (rho(beta, theta) + |0><0| (x) Tr_A rho(beta, theta)) / 2. Throws
/// DomainError when the projective-model condition fails.
DensityMatrix rho_theta(double beta, double theta);

}  // namespace hlc
