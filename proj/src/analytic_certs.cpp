#include "hlc/analytic_certs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hlc/error.hpp"

namespace hlc {

const char* to_string(Technique t) {
  switch (t) {
    case Technique::I3: return "I3";
    case Technique::Lemma1: return "LEMMA1";
    case Technique::I1: return "I1";
  }
  return "?";
}

const char* to_string(ReferenceKind k) {
  switch (k) {
    case ReferenceKind::Werner512: return "werner5/12";
    case ReferenceKind::Canonical: return "canonical";
    case ReferenceKind::RhoTheta: return "rho_theta";
  }
  return "?";
}

ComplexMatrix ReferenceState::matrix() const {
  switch (kind) {
    case ReferenceKind::Werner512: return werner(WernerParams(5.0 / 12.0)).matrix();
    case ReferenceKind::Canonical: return canonical_state(CanonicalParams(alpha, theta)).matrix();
    case ReferenceKind::RhoTheta: return rho_theta(beta, theta).matrix();
  }
  throw DomainError("unknown reference kind");
}

namespace {

double min_eig(const ComplexMatrix& m) { return eig_hermitian(m).values(0); }

std::string num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

void fail(DecompositionCertificate& c, std::string why) {
  c.valid = false;
  if (c.failure.empty()) c.failure = std::move(why);
}

// Builds S from the stored target, reference and q, then fills margins.
void finalize(DecompositionCertificate& c) {
  c.valid = true;
  const ComplexMatrix target = canonical_matrix(c.target_alpha, c.target_theta);
  const ComplexMatrix ref = c.reference.matrix();
  if (!(c.q >= -1e-15 && c.q <= 1.0 + 1e-12)) {
    c.s = ComplexMatrix::Zero(4, 4);
    return fail(c, "mixing weight q = " + num(c.q) + " outside [0, 1]");
  }
  c.q = std::clamp(c.q, 0.0, 1.0);
  if (1.0 - c.q <= 1e-12) {
    c.q = 1.0;
    c.no_remainder = true;
    c.s = ComplexMatrix::Zero(4, 4);
    c.reconstruction_error = max_abs_distance(target, ref);
    if (c.reconstruction_error >= kReconstructionTol)
      fail(c, "q = 1 but the target differs from the reference by " + num(c.reconstruction_error));
    return;
  }
  c.s = (target - c.q * ref) / (1.0 - c.q);
  c.reconstruction_error = max_abs_distance(c.q * ref + (1.0 - c.q) * c.s, target);
  c.psd_margin = min_eig(c.s);
  c.ppt_margin = min_eig(partial_transpose(c.s, Subsystem::B));
  if (c.reconstruction_error >= kReconstructionTol)
    fail(c, "reconstruction error " + num(c.reconstruction_error));
  if (c.psd_margin < -kBoundaryTol) fail(c, "remainder has negative eigenvalue " + num(c.psd_margin));
  if (c.ppt_margin < -kBoundaryTol)
    fail(c, "remainder partial transpose has negative eigenvalue " + num(c.ppt_margin));
}

void check_theta(double theta, const char* who) {
  if (!(theta >= 0.0 && theta <= kQuarterPi + 1e-12))
    throw DomainError(std::string(who) + ": theta must lie in [0, pi/4]");
}

void check_alpha(double alpha, const char* who) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError(std::string(who) + ": alpha must lie in [0, 1]");
}

}  // namespace

double i3_alpha_bound(double theta) {
  const double d = 17.0 / 5.0 / std::tan(theta) - 1.0;
  return d > 0.0 ? 1.0 / d : std::numeric_limits<double>::infinity();
}

DecompositionCertificate i3_certificate(double alpha, double theta) {
  check_alpha(alpha, "i3_certificate");
  check_theta(theta, "i3_certificate");
  DecompositionCertificate c;
  c.technique = Technique::I3;
  c.target_alpha = alpha;
  c.target_theta = std::min(theta, kQuarterPi);
  c.reference = {ReferenceKind::Werner512, 5.0 / 12.0, 0.0, 0.0};
  c.q = 12.0 / 5.0 * alpha * std::sin(2.0 * c.target_theta);
  finalize(c);
  c.diagnostics.emplace_back("alpha_bound", i3_alpha_bound(c.target_theta));
  return c;
}

double lemma1_max_alpha(double alpha, double theta, double theta_prime) {
  check_alpha(alpha, "lemma1_max_alpha");
  check_theta(theta, "lemma1_max_alpha");
  check_theta(theta_prime, "lemma1_max_alpha");
  if (theta_prime < theta) throw DomainError("lemma1_max_alpha: theta' < theta (the lemma only extends upward)");
  if (theta_prime == theta) return alpha;
  const double t = std::tan(theta) * alpha / ((1.0 + alpha) * std::tan(std::min(theta_prime, kQuarterPi)));
  return t / (1.0 - t);
}

DecompositionCertificate lemma1_certificate(double alpha, double theta, double alpha_prime,
                                            double theta_prime) {
  check_alpha(alpha, "lemma1_certificate");
  check_alpha(alpha_prime, "lemma1_certificate");
  check_theta(theta, "lemma1_certificate");
  check_theta(theta_prime, "lemma1_certificate");
  if (theta_prime < theta) throw DomainError("lemma1_certificate: theta' < theta");

  DecompositionCertificate c;
  c.technique = Technique::Lemma1;
  c.target_alpha = alpha_prime;
  c.target_theta = std::min(theta_prime, kQuarterPi);
  c.reference = {ReferenceKind::Canonical, alpha, std::min(theta, kQuarterPi), 0.0};

  const double ct = std::cos(c.reference.theta), st = std::sin(c.reference.theta);
  const double cp = std::cos(c.target_theta), sp = std::sin(c.target_theta);
  const double den = alpha * ct * st;
  const double numer = alpha_prime * cp * sp;
  if (alpha_prime == alpha && theta_prime == theta) {
    c.q = 1.0;
  } else if (den <= 0.0) {
    if (numer > 0.0) {
      c.s = ComplexMatrix::Zero(4, 4);
      fail(c, "reference rho(" + num(alpha) + ", " + num(theta) + ") has no coherence to absorb the target's");
      return c;
    }
    c.q = 0.0;
  } else {
    c.q = numer / den;
  }
  finalize(c);
  if (c.no_remainder || (c.s.isZero() && !c.failure.empty())) return c;

  // The four diagonal positivity conditions, checked directly on (1 - q) S.
  const ComplexMatrix scaled = (1.0 - c.q) * c.s;
  const char* names[4] = {"condition 1 (|00>)", "condition 2 (|01>)", "condition 3 (|10>)",
                          "condition 4 (|11>)"};
  int binding = 0;
  for (int i = 0; i < 4; ++i) {
    const double v = scaled(i, i).real();
    c.diagnostics.emplace_back(names[i], v);
    if (v < scaled(binding, binding).real()) binding = i;
    if (v < -kBoundaryTol) fail(c, std::string(names[i]) + " violated: " + num(v));
  }
  const double anti = std::abs(c.s(0, 3));
  c.diagnostics.emplace_back("anti_diagonal", anti);
  if (anti >= 1e-10) fail(c, "anti-diagonal of S does not vanish: " + num(anti));
  const double tr_err = std::abs(c.s.trace().real() - 1.0);
  c.diagnostics.emplace_back("trace_error", tr_err);
  if (tr_err >= 1e-10) fail(c, "trace of S differs from 1 by " + num(tr_err));
  // Diagnostic only: condition 1 is expected to be the binding one.
  c.diagnostics.emplace_back("binding_condition", binding + 1);
  return c;
}

DecompositionCertificate i1_certificate(double alpha, double theta, double q, double beta) {
  check_alpha(alpha, "i1_certificate");
  check_theta(theta, "i1_certificate");
  if (!(q > 0.0 && q < 1.0)) throw DomainError("i1_certificate: q must lie in (0, 1)");
  DecompositionCertificate c;
  c.technique = Technique::I1;
  c.target_alpha = alpha;
  c.target_theta = std::min(theta, kQuarterPi);
  c.reference = {ReferenceKind::RhoTheta, 0.0, c.target_theta, beta};
  c.q = q;
  const double margin = eq18_margin(beta, c.target_theta);
  c.diagnostics.emplace_back("projective_model_margin", margin);
  if (margin < 0.0) {
    c.s = ComplexMatrix::Zero(4, 4);
    fail(c, "reference model condition fails at beta=" + num(beta) + ", theta=" + num(theta) +
                " (margin " + num(margin) + ")");
    return c;
  }
  finalize(c);
  const auto [k, res] = scale_fit((1.0 - q) * c.s, i1_printed_remainder(alpha, c.target_theta, q, beta));
  c.diagnostics.emplace_back("printed_entries_scale", k);
  c.diagnostics.emplace_back("printed_entries_residual", res);
  return c;
}

ComplexMatrix i1_printed_remainder(double alpha, double theta, double q, double beta) {
  const double c2 = std::cos(theta) * std::cos(theta), s2 = std::sin(theta) * std::sin(theta);
  const double cs = std::cos(theta) * std::sin(theta);
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = 2 * c2 * (1 + alpha) - q * (2 * c2 * (1 + beta) + s2 * (1 - beta));
  m(1, 1) = 2 * c2 * (1 - alpha) - q * (2 * c2 * (1 - beta) + s2 * (1 + beta));
  m(2, 2) = 2 * s2 * (1 - alpha) - q * s2 * (1 - beta);
  m(3, 3) = 2 * s2 * (1 + alpha) - q * s2 * (1 + beta);
  m(0, 3) = m(3, 0) = 4 * alpha * cs - q * 2 * beta * cs;
  return m;
}

std::pair<double, double> scale_fit(const ComplexMatrix& a, const ComplexMatrix& b) {
  const double bb = b.squaredNorm();
  if (bb == 0.0) return {0.0, a.cwiseAbs().maxCoeff()};
  const double k = (b.adjoint() * a).trace().real() / bb;
  return {k, (a - k * b).cwiseAbs().maxCoeff()};
}

PptResult is_ppt_separable(const DensityMatrix& rho) {
  if (rho.dim() != 4) throw DomainError("is_ppt_separable: expected a 2 x 2 bipartite state");
  PptResult r;
  r.margin = min_eig(partial_transpose(rho.matrix(), Subsystem::B));
  r.separable = r.margin >= -1e-10;
  return r;
}

VerificationReport verify_decomposition(const DecompositionCertificate& c) {
  VerificationReport rep;
  rep.add("q_in_range", c.q, 0.0, c.q >= 0.0 && c.q <= 1.0);
  rep.add("s_dimensions", static_cast<double>(c.s.rows()), 0.0, c.s.rows() == 4 && c.s.cols() == 4);
  if (c.s.rows() != 4 || c.s.cols() != 4) return rep;

  ComplexMatrix target, ref;
  try {
    target = canonical_state(CanonicalParams(c.target_alpha, c.target_theta)).matrix();
    ref = c.reference.matrix();
  } catch (const Error&) {
    rep.add("parameters_valid", 0.0, 0.0, false);
    return rep;
  }

  switch (c.technique) {
    case Technique::I3:
      rep.add("reference_kind", 0.0, 0.0, c.reference.kind == ReferenceKind::Werner512);
      break;
    case Technique::Lemma1:
      rep.add("reference_kind", 0.0, 0.0,
              c.reference.kind == ReferenceKind::Canonical && c.reference.theta <= c.target_theta);
      break;
    case Technique::I1: {
      const double m = eq18_margin(c.reference.beta, c.reference.theta);
      rep.add("reference_kind", 0.0, 0.0,
              c.reference.kind == ReferenceKind::RhoTheta && c.reference.theta == c.target_theta);
      rep.add("projective_model_margin", m, 0.0, m >= 0.0);
      break;
    }
  }

  if (c.no_remainder) {
    const double d = max_abs_distance(target, ref);
    rep.add("no_remainder_q", c.q, 0.0, c.q == 1.0);
    rep.add("reconstruction", d, kReconstructionTol, d < kReconstructionTol);
  } else {
    const double d = max_abs_distance(c.q * ref + (1.0 - c.q) * c.s, target);
    rep.add("reconstruction", d, kReconstructionTol, d < kReconstructionTol);
    const double asym = max_asymmetry(c.s);
    rep.add("s_hermitian", asym, 1e-12, asym <= 1e-12);
    const double tr = std::abs(c.s.trace().real() - 1.0);
    rep.add("s_trace", tr, 1e-10, tr < 1e-10);
    const double pm = min_eig(0.5 * (c.s + c.s.adjoint()));
    const ComplexMatrix pt = partial_transpose(c.s, Subsystem::B);
    const double tm = min_eig(0.5 * (pt + pt.adjoint()));
    rep.add("s_psd", pm, kBoundaryTol, pm >= -kBoundaryTol);
    rep.add("s_ppt", tm, kBoundaryTol, tm >= -kBoundaryTol);
  }
  rep.valid = rep.first_failure() == nullptr;
  rep.certified = rep.valid;
  return rep;
}

}  // namespace hlc
