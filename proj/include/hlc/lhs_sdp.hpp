#pragma once

// Numerical local-hidden-state certificates for the canonical family
// rho(q, theta) against a finite measurement set, lifted to all POVMs through
// the noise-shrinking factor eta.
//
// Unknowns: a Hermitian operator chi on AB, one hidden state sigma_lambda per
// deterministic strategy, and the visibility q. Constraints:
//
//   Tr_A[(M_a|x (x) 1) chi] = sum_lambda D_lambda(a|x) sigma_lambda   (every nonzero M_a|x)
//   sigma_lambda >= 0,  Tr chi >= 0
//   R = rho(q, theta) - eta chi - (1 - eta) xi_A (x) Tr_A chi >= 0,  R^{T_B} >= 0
//
// and q is maximized. A PPT remainder on two qubits is separable, so
// rho(q, theta) = eta chi + (1 - eta) xi_A (x) chi_B + R is unsteerable from
// Alice to Bob for every POVM whose eta-shrunk version the finite set simulates.

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hlc/linalg.hpp"
#include "hlc/measurements.hpp"
#include "hlc/sdp_solver.hpp"
#include "hlc/verification.hpp"

namespace hlc {

/// Real coordinates of an n x n Hermitian matrix: diagonal entries, then
/// (Re, Im) of each upper off-diagonal entry.
std::vector<ComplexMatrix> hermitian_basis(int n);

struct Protocol1Options {
  /// Fix q instead of maximizing it; the last unknown becomes a slack t with
  /// every cone block shifted by -t 1 and t maximized. Feasible iff t* >= 0.
  std::optional<double> fixed_q;
  bool strict_chi = false;  ///< additionally require chi >= 0
};

struct SdpLayout {
  int chi_offset = 0;      ///< 16 unknowns
  int sigma_offset = 16;   ///< 4 unknowns per strategy
  int num_strategies = 0;
  int last_index = 0;      ///< q, or the slack t in fixed-q mode
  int num_vars = 0;
};

struct SdpProblem {
  ConicProblem conic;
  SdpLayout layout;
  double theta = 0.0;
  double eta = 0.0;
  double p = 0.0;
  std::vector<DeterministicStrategy> strategies;
  std::optional<double> fixed_q;
};

/// Throws DomainError on an empty set, theta outside (0, pi/4], eta outside
/// (0, 1], or p outside [0, 1].
SdpProblem build_protocol1(double theta, double eta, double p, const MeasurementSet& ms,
                           const Protocol1Options& opts = {});

enum class SdpMode { Direct, Bisection };

struct LhsSdpOptions {
  SdpMode mode = SdpMode::Direct;
  SolverOptions solver;
  int bisection_iterations = 16;
  bool strict_chi = false;
  /// When unset, eta must be covered by the published shrinking table for the
  /// icosahedron set; otherwise this bound is used and the certificate is
  /// labelled non-certified.
  std::optional<double> eta_bound;
  std::shared_ptr<const ConicBackend> backend;  ///< default_backend() when null
};

struct LhsSdpCertificate {
  double theta = 0.0;
  double eta = 0.0;
  double p = 0.0;
  std::string measurement_set;
  double eta_bound = 0.0;
  bool eta_from_table = false;

  double q_solver = 0.0;     ///< optimum as returned by the solver
  double q_certified = 0.0;  ///< after back-off; all checks hold exactly here
  double backoff = 0.0;

  ComplexMatrix chi;
  std::vector<ComplexMatrix> sigma;
  std::vector<std::vector<std::size_t>> strategies;  ///< outcome per measurement

  std::string backend;
  SdpMode mode = SdpMode::Direct;
  int iterations = 0;
  double relative_gap = 0.0;
  bool strict_chi = false;
  std::vector<std::pair<std::string, std::string>> metadata;
};

/// Throws SolverError when the solver fails or polishing cannot restore
/// feasibility, DomainError on bad input or an uncovered eta.
LhsSdpCertificate solve_protocol1(double theta, double eta, double p, const MeasurementSet& ms,
                                  const LhsSdpOptions& opts = {});

/// Independent re-check from the stored operators only.
VerificationReport verify_certificate(const LhsSdpCertificate& cert, const MeasurementSet& ms);

/// sigma_a|x = sum_lambda D_lambda(a|x) sigma_lambda, indexed [x][a].
std::vector<std::vector<ComplexMatrix>> assemblage(const LhsSdpCertificate& cert,
                                                   const MeasurementSet& ms);

/// rho(q, theta) - eta chi - (1 - eta) xi_A (x) Tr_A chi.
ComplexMatrix remainder(const LhsSdpCertificate& cert);

}  // namespace hlc
