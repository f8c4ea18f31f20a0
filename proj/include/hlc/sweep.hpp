#pragma once

// Covers theta in [0, pi/4] with certified visibilities: the small-theta
// construction on [0, theta_s], SDP grid points glued by the interpolation
// lemma on [theta_s, theta_l], and the Werner-mixture bound on [theta_l, pi/4].
// alpha_c is the smallest guarantee anywhere on the range.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hlc/analytic_certs.hpp"
#include "hlc/lhs_sdp.hpp"
#include "hlc/states.hpp"

namespace hlc {

enum class EtaSource { Table, Computed };
const char* to_string(EtaSource s);

/// Fixed: one p for every grid point. Best: at every grid point, the table
/// row (p, eta) giving the largest certified q.
enum class PMode { Fixed, Best };
const char* to_string(PMode m);

struct SweepConfig {
  double theta_s = 0.1;
  double theta_l = 0.7365;
  int grid = 32;              ///< SDP points on [theta_s, theta_l], endpoints included
  /// Gaps whose interpolation loss (SDP value minus the Lemma-1 floor) exceeds
  /// this are bisected with extra SDP points; 0 keeps the uniform grid only.
  double max_interp_loss = 0.003;
  double min_spacing = 1e-4;  ///< gaps are never split below this width
  int max_grid_points = 4000;
  int i1_points = 5;          ///< records on [0, theta_s]
  int i3_points = 16;         ///< records on [theta_l, pi/4]
  EtaSource eta_source = EtaSource::Table;
  double p = 0.0;
  PMode p_mode = PMode::Fixed;
  double shrink_resolution = 0.005;  ///< computed-eta mode only
  I1Parameters i1;
  bool enable_i1 = true;
  bool enable_i2 = true;
  bool enable_i3 = true;
  int threads = 0;            ///< 0: HLC_THREADS, else hardware concurrency
  LhsSdpOptions sdp;

  /// Throws DomainError on inconsistent settings.
  void validate() const;
  /// Canonical key=value rendering, used for hashing and reports.
  std::string canonical() const;
  /// FNV-1a 64 of canonical().
  std::uint64_t hash() const;
};

enum class CertKind { None, LhsSdp, Decomposition };

struct SweepRecord {
  double theta = 0.0;        ///< where the certificate lives (CSV abscissa)
  double lo = 0.0;           ///< alpha_certified holds for every theta in [lo, hi]
  double hi = 0.0;
  double alpha_certified = 0.0;
  std::string technique;     ///< I1, SDP, LEMMA1, I3
  CertKind cert_kind = CertKind::None;
  int cert_index = -1;       ///< into sdp_certificates or decompositions
};

struct SweepTimings {
  double i1_seconds = 0.0;
  double i2_seconds = 0.0;
  double i3_seconds = 0.0;
  double shrink_seconds = 0.0;
  double total_seconds = 0.0;
};

struct SweepResult {
  SweepConfig config;
  std::vector<SweepRecord> records;  ///< sorted by theta, then technique
  std::vector<LhsSdpCertificate> sdp_certificates;
  std::vector<DecompositionCertificate> decompositions;
  std::optional<double> alpha_c;     ///< empty when no interval ran
  std::vector<std::pair<std::string, double>> technique_minima;
  bool certified = true;             ///< false in computed-eta mode
  std::vector<std::pair<double, double>> eta_used;  ///< (p, eta) pairs used by the SDP interval
  bool refinement_capped = false;    ///< max_grid_points or min_spacing stopped refinement early
  SweepTimings timings;
  static constexpr double kReportedAlphaCHigh = 0.3656;
  static constexpr double kReportedAlphaCLow = 0.3636;

  /// Certified visibility at theta (pointwise; Lemma 1 evaluated at theta
  /// itself inside SDP gaps). Empty when theta is outside every enabled interval.
  std::optional<double> guarantee_at(double theta) const;
};

/// Throws CertificateError (with the offending theta) when a certificate fails
/// re-verification, SolverError when an SDP cannot be solved.
SweepResult sweep(const SweepConfig& cfg);

/// Uniform grid of `count` points on [a, b]; a single point is `a`.
std::vector<double> uniform_grid(double a, double b, int count);

enum class Verdict { UnsteerableAfterFiltering, Unknown };
const char* to_string(Verdict v);

struct VerdictReport {
  Verdict verdict = Verdict::Unknown;
  double alpha = 0.0;
  double theta = 0.0;
  double success_probability = 0.0;
  std::optional<double> certified_alpha;
  std::vector<std::string> chain;  ///< human-readable steps; never empty for a locality claim
  std::string reason;              ///< why the verdict is UNKNOWN
  std::optional<DecompositionCertificate> local_certificate;  ///< built at theta when needed
  int sdp_certificate_index = -1;  ///< SDP certificate the chain rests on, if any
};

/// Werner state rho_W(alpha) filtered by F_A (x) F_B. Throws DomainError when
/// the filters annihilate the state.
VerdictReport verdict(double alpha, const ComplexMatrix& f_a, const ComplexMatrix& f_b,
                      const SweepResult& sweep);

/// "theta,alpha_certified,technique" rows at 12 significant digits.
std::string emit_csv(const SweepResult& result);

/// Number of worker threads for a sweep (config, then HLC_THREADS, then hardware).
int resolve_threads(int requested);

}  // namespace hlc
