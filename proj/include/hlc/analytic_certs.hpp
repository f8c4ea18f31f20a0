#pragma once

// Closed-form convex decompositions rho(alpha, theta) = q * reference + (1 - q) * S
// with S separable (PSD and PPT on two qubits). The reference is a state already
// known to be unsteerable, so the target inherits an LHS model.
//
// Remainders are always built from the constructed matrices, never from
// transcribed entry formulas.

#include <string>
#include <utility>
#include <vector>

#include "hlc/linalg.hpp"
#include "hlc/states.hpp"
#include "hlc/verification.hpp"

namespace hlc {

/// Eigenvalue slack accepted at analytic boundaries; the margin is recorded.
inline constexpr double kBoundaryTol = 1e-9;
inline constexpr double kReconstructionTol = 1e-10;

enum class Technique { I3, Lemma1, I1 };
const char* to_string(Technique t);

enum class ReferenceKind { Werner512, Canonical, RhoTheta };
const char* to_string(ReferenceKind k);

struct ReferenceState {
  ReferenceKind kind = ReferenceKind::Werner512;
  double alpha = 5.0 / 12.0;  ///< Canonical only
  double theta = 0.0;         ///< Canonical and RhoTheta
  double beta = 0.0;          ///< RhoTheta only

  ComplexMatrix matrix() const;
};

struct DecompositionCertificate {
  Technique technique = Technique::I3;
  double target_alpha = 0.0;
  double target_theta = 0.0;
  double q = 0.0;
  ReferenceState reference;
  bool no_remainder = false;  ///< q = 1: target equals the reference
  ComplexMatrix s;            ///< normalized remainder (zero when no_remainder)
  double psd_margin = 0.0;    ///< min eigenvalue of S
  double ppt_margin = 0.0;    ///< min eigenvalue of S^{T_B}
  double reconstruction_error = 0.0;
  bool valid = false;
  std::string failure;
  std::vector<std::pair<std::string, double>> diagnostics;
};

/// 1 / ((17/5) cot(theta) - 1); the I3 visibility bound. Infinite where the
/// denominator is not positive.
double i3_alpha_bound(double theta);

/// q = (12/5) alpha sin(2 theta) against the Werner state at 5/12.
DecompositionCertificate i3_certificate(double alpha, double theta);

/// alpha' = t / (1 - t), t = tan(theta) alpha / ((1 + alpha) tan(theta')).
/// Throws DomainError when theta' < theta or arguments leave their ranges.
double lemma1_max_alpha(double alpha, double theta, double theta_prime);

/// Target rho(alpha', theta'), reference rho(alpha, theta),
/// q = alpha' cos(theta') sin(theta') / (alpha cos(theta) sin(theta)).
DecompositionCertificate lemma1_certificate(double alpha, double theta, double alpha_prime,
                                            double theta_prime);

struct I1Parameters {
  double alpha = 0.4;
  double q = 0.5;
  double beta = 0.75;
};

/// Target rho(alpha, theta), reference rho_theta(beta, theta).
DecompositionCertificate i1_certificate(double alpha, double theta, double q, double beta);
inline DecompositionCertificate i1_certificate(double theta, const I1Parameters& p = {}) {
  return i1_certificate(p.alpha, theta, p.q, p.beta);
}

/// The printed closed-form entries for (1 - q) S in the small-theta
/// construction, up to an overall positive scale. Cross-check only.
ComplexMatrix i1_printed_remainder(double alpha, double theta, double q, double beta);

/// Best positive scale k with a ~ k b and the residual max|a - k b|.
std::pair<double, double> scale_fit(const ComplexMatrix& a, const ComplexMatrix& b);

struct PptResult {
  bool separable = false;
  double margin = 0.0;  ///< min eigenvalue of rho^{T_B}
};

/// Two-qubit PPT test (equivalent to separability in 2 x 2).
PptResult is_ppt_separable(const DensityMatrix& rho);

/// Re-checks a certificate from its stored fields only.
VerificationReport verify_decomposition(const DecompositionCertificate& cert);

}  // namespace hlc
