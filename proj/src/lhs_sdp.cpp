#include "hlc/lhs_sdp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hlc/error.hpp"
#include "hlc/states.hpp"

namespace hlc {

std::vector<ComplexMatrix> hermitian_basis(int n) {
  std::vector<ComplexMatrix> out;
  for (int i = 0; i < n; ++i) {
    ComplexMatrix e = ComplexMatrix::Zero(n, n);
    e(i, i) = 1.0;
    out.push_back(e);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      ComplexMatrix re = ComplexMatrix::Zero(n, n), im = ComplexMatrix::Zero(n, n);
      re(i, j) = re(j, i) = 1.0;
      im(i, j) = Complex(0.0, -1.0);
      im(j, i) = Complex(0.0, 1.0);
      out.push_back(re);
      out.push_back(im);
    }
  return out;
}

namespace {

// Real coordinates matching hermitian_basis(2): entry (1,0) = b + i c.
Eigen::Vector4d coords2(const ComplexMatrix& m) {
  return {m(0, 0).real(), m(1, 1).real(), m(1, 0).real(), m(1, 0).imag()};
}

ComplexMatrix xi_b_map(const ComplexMatrix& chi, const ComplexMatrix& xi, double eta) {
  return eta * chi + (1.0 - eta) * tensor(xi, partial_trace(chi, Subsystem::A, 2, 2));
}

ComplexMatrix reduced_rho_a(double theta) {
  ComplexMatrix r = ComplexMatrix::Zero(2, 2);
  r(0, 0) = std::cos(theta) * std::cos(theta);
  r(1, 1) = std::sin(theta) * std::sin(theta);
  return r;
}

ComplexMatrix combine(const std::vector<ComplexMatrix>& basis, const Eigen::VectorXd& x, int offset) {
  ComplexMatrix m = ComplexMatrix::Zero(basis[0].rows(), basis[0].cols());
  for (std::size_t k = 0; k < basis.size(); ++k) m += x(offset + static_cast<int>(k)) * basis[k];
  return m;
}

double min_eig(const ComplexMatrix& m) { return eig_hermitian(m).values(0); }

}  // namespace

SdpProblem build_protocol1(double theta, double eta, double p, const MeasurementSet& ms,
                           const Protocol1Options& opts) {
  if (ms.size() == 0) throw DomainError("build_protocol1: empty measurement set");
  if (!(theta > 0.0 && theta <= kQuarterPi + 1e-12))
    throw DomainError("build_protocol1: theta must lie in (0, pi/4]");
  if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("build_protocol1: eta must lie in (0, 1]");
  for (const auto& m : ms.povms())
    if (m.elements().at(0).dim() != 2) throw DomainError("build_protocol1: measurements must act on a qubit");
  if (opts.fixed_q && !(*opts.fixed_q >= 0.0 && *opts.fixed_q <= 1.0))
    throw DomainError("build_protocol1: fixed q outside [0, 1]");

  SdpProblem sp;
  sp.theta = std::min(theta, kQuarterPi);
  sp.eta = eta;
  sp.p = p;
  sp.fixed_q = opts.fixed_q;
  sp.strategies = enumerate_strategies(ms);
  const ComplexMatrix xi = xi_state(p).matrix();

  SdpLayout& lay = sp.layout;
  lay.num_strategies = static_cast<int>(sp.strategies.size());
  lay.last_index = lay.sigma_offset + 4 * lay.num_strategies;
  lay.num_vars = lay.last_index + 1;

  const auto b4 = hermitian_basis(4);
  const auto b2 = hermitian_basis(2);
  ConicProblem& cp = sp.conic;
  cp.num_vars = lay.num_vars;
  cp.objective = Eigen::VectorXd::Zero(lay.num_vars);
  cp.objective(lay.last_index) = 1.0;

  // Marginal equalities, four real rows per nonzero M_a|x.
  std::vector<Eigen::VectorXd> rows;
  for (std::size_t x = 0; x < ms.size(); ++x) {
    for (std::size_t a : ms[x].nonzero_outcomes()) {
      const ComplexMatrix lift = tensor(ms[x].element(a).matrix(), identity2());
      Eigen::MatrixXd block = Eigen::MatrixXd::Zero(4, lay.num_vars);
      for (int k = 0; k < 16; ++k)
        block.col(lay.chi_offset + k) = coords2(partial_trace(lift * b4[k], Subsystem::A, 2, 2));
      for (int l = 0; l < lay.num_strategies; ++l) {
        if (sp.strategies[l].response(x, a) == 0.0) continue;
        for (int k = 0; k < 4; ++k) block.col(lay.sigma_offset + 4 * l + k) = -coords2(b2[k]);
      }
      for (int r = 0; r < 4; ++r) rows.push_back(block.row(r).transpose());
    }
  }
  cp.eq_matrix.resize(static_cast<Eigen::Index>(rows.size()), lay.num_vars);
  for (std::size_t r = 0; r < rows.size(); ++r) cp.eq_matrix.row(static_cast<Eigen::Index>(r)) = rows[r];
  cp.eq_rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rows.size()));

  const bool slack = opts.fixed_q.has_value();
  auto add_slack = [&](LmiBlock& b) {
    if (slack) b.terms.emplace_back(lay.last_index, -ComplexMatrix::Identity(b.dim(), b.dim()));
  };

  for (int l = 0; l < lay.num_strategies; ++l) {
    LmiBlock b{"sigma" + std::to_string(l), ComplexMatrix::Zero(2, 2), {}};
    for (int k = 0; k < 4; ++k) b.terms.emplace_back(lay.sigma_offset + 4 * l + k, b2[k]);
    add_slack(b);
    cp.blocks.push_back(std::move(b));
  }

  const ComplexMatrix r0 = tensor(reduced_rho_a(sp.theta), identity2() / 2.0);
  const ComplexVector psi = psi_theta(sp.theta);
  const ComplexMatrix r1 = psi * psi.adjoint() - r0;

  LmiBlock rem{"remainder", slack ? ComplexMatrix(r0 + *opts.fixed_q * r1) : r0, {}};
  if (!slack) rem.terms.emplace_back(lay.last_index, r1);
  for (int k = 0; k < 16; ++k) rem.terms.emplace_back(lay.chi_offset + k, -xi_b_map(b4[k], xi, eta));
  LmiBlock pt{"remainder_pt", partial_transpose(rem.constant, Subsystem::B), {}};
  for (const auto& [i, f] : rem.terms) pt.terms.emplace_back(i, partial_transpose(f, Subsystem::B));
  add_slack(rem);
  add_slack(pt);
  cp.blocks.push_back(std::move(rem));
  cp.blocks.push_back(std::move(pt));

  LmiBlock tr{"chi_trace", ComplexMatrix::Zero(1, 1), {}};
  for (int k = 0; k < 4; ++k) tr.terms.emplace_back(lay.chi_offset + k, ComplexMatrix::Constant(1, 1, 1.0));
  add_slack(tr);
  cp.blocks.push_back(std::move(tr));

  if (opts.strict_chi) {
    LmiBlock chi{"chi_psd", ComplexMatrix::Zero(4, 4), {}};
    for (int k = 0; k < 16; ++k) chi.terms.emplace_back(lay.chi_offset + k, b4[k]);
    add_slack(chi);
    cp.blocks.push_back(std::move(chi));
  }
  return sp;
}

namespace {

double resolve_eta_bound(double eta, double p, const MeasurementSet& ms, const LhsSdpOptions& opts,
                         bool& from_table) {
  from_table = false;
  if (opts.eta_bound) return *opts.eta_bound;
  if (ms.id() == "icosahedron") {
    if (auto t = published_shrinking_factor(p)) {
      from_table = true;
      return *t;
    }
  }
  std::ostringstream os;
  os << "no shrinking-factor bound available for set '" << ms.id() << "' at p=" << p
     << "; pass an explicit eta bound";
  (void)eta;
  throw DomainError(os.str());
}

struct RawPoint {
  Eigen::VectorXd x;
  double q = 0.0;
  int iterations = 0;
  double gap = 0.0;
};

}  // namespace

LhsSdpCertificate solve_protocol1(double theta, double eta, double p, const MeasurementSet& ms,
                                  const LhsSdpOptions& opts) {
  LhsSdpCertificate cert;
  cert.theta = theta;
  cert.eta = eta;
  cert.p = p;
  cert.measurement_set = ms.id();
  cert.eta_bound = resolve_eta_bound(eta, p, ms, opts, cert.eta_from_table);
  if (eta > cert.eta_bound + 1e-12) {
    std::ostringstream os;
    os << "eta = " << eta << " exceeds the shrinking-factor bound " << cert.eta_bound;
    throw DomainError(os.str());
  }
  const auto backend = opts.backend ? opts.backend : default_backend();
  cert.backend = backend->name();
  cert.mode = opts.mode;

  RawPoint raw;
  cert.strict_chi = opts.strict_chi;
  SdpProblem sp = build_protocol1(theta, eta, p, ms, {std::nullopt, opts.strict_chi});
  if (opts.mode == SdpMode::Direct) {
    const ConicSolution sol = backend->solve(sp.conic, opts.solver);
    if (!usable(sol.status))
      throw SolverError(std::string("protocol-1 SDP: solver returned ") + to_string(sol.status));
    raw = {sol.x, sol.x(sp.layout.last_index), sol.iterations, sol.relative_gap};
  } else {
    double lo = 0.0, hi = 1.0;
    bool have = false;
    for (int it = 0; it <= opts.bisection_iterations; ++it) {
      const double q = it == 0 ? 0.0 : 0.5 * (lo + hi);
      const SdpProblem fp = build_protocol1(theta, eta, p, ms, {q, opts.strict_chi});
      const ConicSolution sol = backend->solve(fp.conic, opts.solver);
      if (!usable(sol.status))
        throw SolverError(std::string("protocol-1 slack SDP: solver returned ") + to_string(sol.status));
      raw.iterations += sol.iterations;
      if (sol.objective >= 0.0) {
        lo = q;
        Eigen::VectorXd x = sol.x;
        x(fp.layout.last_index) = q;  // slack slot now carries q
        raw.x = x;
        raw.q = q;
        raw.gap = sol.relative_gap;
        have = true;
      } else if (it == 0) {
        throw SolverError("protocol-1 slack SDP: infeasible even at q = 0");
      } else {
        hi = q;
      }
    }
    if (!have) throw SolverError("protocol-1 bisection found no feasible point");
  }
  cert.q_solver = raw.q;
  cert.iterations = raw.iterations;
  cert.relative_gap = raw.gap;

  // Back off toward a strictly feasible point x0: q = 0, chi = s 1/4 and
  // sigma_lambda = s w_lambda 1/2 with w_lambda = prod_x Tr[M_lambda(x)|x]/2, which
  // satisfies every marginal equality. With s = sin^2(theta)/2 the remainder keeps
  // eigenvalues >= sin^2(theta)/4. Each block is affine in x, so the smallest
  // eigenvalue along the segment is at least the interpolated endpoint values.
  const auto b4 = hermitian_basis(4);
  const auto b2 = hermitian_basis(2);
  const double th = std::min(theta, kQuarterPi);
  const double s = std::sin(th) * std::sin(th) / 2.0;
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(sp.layout.num_vars);
  for (int k = 0; k < 4; ++k) x0(sp.layout.chi_offset + k) = s / 4.0;
  for (int l = 0; l < sp.layout.num_strategies; ++l) {
    double w = 1.0;
    for (std::size_t x = 0; x < ms.size(); ++x)
      w *= ms[x].element(sp.strategies[l].outcome[x]).trace() / 2.0;
    x0(sp.layout.sigma_offset + 4 * l) = x0(sp.layout.sigma_offset + 4 * l + 1) = s * w / 2.0;
  }

  double t = 0.0;
  for (std::size_t b = 0; b < sp.conic.blocks.size(); ++b) {
    const double l1 = min_eig(sp.conic.evaluate_block(b, raw.x));
    if (l1 >= 0.0) continue;
    const double l0 = min_eig(sp.conic.evaluate_block(b, x0));
    if (!(l0 > 0.0)) throw SolverError("protocol-1 SDP: interior reference point is not strictly feasible");
    t = std::max(t, -l1 / (l0 - l1));
  }
  if (t > 0.0) t = std::min(1.0, t * (1.0 + 1e-9) + 1e-15);
  if (!(t < 1.0)) throw SolverError("protocol-1 SDP: polishing cannot restore feasibility");
  const Eigen::VectorXd xp = (1.0 - t) * raw.x + t * x0;

  cert.backoff = t;
  cert.q_certified = (1.0 - t) * raw.q;
  cert.chi = combine(b4, xp, sp.layout.chi_offset);
  for (int l = 0; l < sp.layout.num_strategies; ++l) {
    // Clipping only removes rounding-level negative parts here.
    const ComplexMatrix sl = combine(b2, xp, sp.layout.sigma_offset + 4 * l);
    cert.sigma.push_back(clip_to_psd(HermitianMatrix(sl)).matrix());
    cert.strategies.push_back(sp.strategies[l].outcome);
  }

  std::ostringstream back;
  back.precision(17);
  back << t;
  cert.metadata = {
      {"remainder", "rho(q,theta) - eta chi - (1-eta) xi_A (x) Tr_A chi; the '+' variant admits q > 1 and is unsound"},
      {"eta_source", cert.eta_from_table ? "published table" : "caller-supplied (not certified)"},
      {"backoff", back.str()},
  };

  const VerificationReport rep = verify_certificate(cert, ms);
  if (!rep.valid) throw SolverError("protocol-1 SDP: polished certificate fails verification: " + rep.summary());
  return cert;
}

std::vector<std::vector<ComplexMatrix>> assemblage(const LhsSdpCertificate& cert, const MeasurementSet& ms) {
  if (cert.strategies.size() != cert.sigma.size())
    throw DomainError("assemblage: strategy / hidden-state count mismatch");
  std::vector<std::vector<ComplexMatrix>> out(ms.size());
  for (std::size_t x = 0; x < ms.size(); ++x) {
    out[x].assign(ms[x].outcomes(), ComplexMatrix::Zero(2, 2));
    for (std::size_t l = 0; l < cert.sigma.size(); ++l) {
      if (cert.strategies[l].size() != ms.size())
        throw DomainError("assemblage: strategy does not match the measurement set");
      const std::size_t a = cert.strategies[l][x];
      if (a >= ms[x].outcomes()) throw DomainError("assemblage: strategy outcome out of range");
      out[x][a] += cert.sigma[l];
    }
  }
  return out;
}

ComplexMatrix remainder(const LhsSdpCertificate& cert) {
  const ComplexMatrix xi = xi_state(cert.p).matrix();
  return canonical_matrix(cert.q_certified, std::min(cert.theta, kQuarterPi)) -
         xi_b_map(cert.chi, xi, cert.eta);
}

VerificationReport verify_certificate(const LhsSdpCertificate& cert, const MeasurementSet& ms) {
  VerificationReport rep;
  auto add = [&](std::string name, double value, double tol, bool pass) {
    rep.add(std::move(name), value, tol, pass);
  };
  add("measurement_set_matches", 0.0, 0.0, cert.measurement_set == ms.id());

  // Shape problems are reported, not thrown: a malformed file is just invalid.
  bool shape = cert.chi.rows() == 4 && cert.chi.cols() == 4 && cert.strategies.size() == cert.sigma.size();
  for (const auto& s : cert.sigma) shape = shape && s.rows() == 2 && s.cols() == 2;
  for (const auto& st : cert.strategies) {
    shape = shape && st.size() == ms.size();
    for (std::size_t x = 0; shape && x < ms.size(); ++x) shape = st[x] < ms[x].outcomes();
  }
  add("shapes_consistent", 0.0, 0.0, shape);
  if (!shape) {
    rep.valid = rep.certified = false;
    return rep;
  }
  const auto sig = assemblage(cert, ms);

  double eq_res = 0.0;
  for (std::size_t x = 0; x < ms.size(); ++x)
    for (std::size_t a = 0; a < ms[x].outcomes(); ++a) {
      const ComplexMatrix lhs =
          partial_trace(tensor(ms[x].element(a).matrix(), identity2()) * cert.chi, Subsystem::A, 2, 2);
      eq_res = std::max(eq_res, max_abs_distance(lhs, sig[x][a]));
    }
  add("marginal_equalities", eq_res, 1e-8, eq_res < 1e-8);

  double sig_min = 0.0;
  for (const auto& s : cert.sigma) sig_min = std::min(sig_min, min_eig(s));
  add("hidden_states_psd", sig_min, 1e-12, sig_min >= -1e-12);

  add("chi_hermitian", max_asymmetry(cert.chi), 1e-12, max_asymmetry(cert.chi) <= 1e-12);
  const double tr = cert.chi.trace().real();
  add("chi_trace", tr, 0.0, tr >= 0.0);
  if (cert.strict_chi) {
    const double cmin = min_eig(cert.chi);
    add("chi_psd", cmin, 1e-10, cmin >= -1e-10);
  }

  const ComplexMatrix rem = remainder(cert);
  const double rmin = min_eig(rem);
  const double pmin = min_eig(partial_transpose(rem, Subsystem::B));
  add("remainder_psd", rmin, 1e-10, rmin >= -1e-10);
  add("remainder_ppt", pmin, 1e-10, pmin >= -1e-10);
  // A table-sourced bound is looked up again rather than trusted.
  double bound = cert.eta_bound;
  if (cert.eta_from_table) {
    const auto tb = cert.measurement_set == "icosahedron" ? published_shrinking_factor(cert.p) : std::nullopt;
    bound = tb ? std::min(*tb, bound) : -1.0;
  }
  add("eta_within_bound", bound - cert.eta, 0.0, cert.eta <= bound + 1e-12);
  add("q_in_range", cert.q_certified, 0.0, cert.q_certified >= 0.0 && cert.q_certified <= 1.0);

  rep.valid = std::all_of(rep.checks.begin(), rep.checks.end(), [](const CheckResult& c) { return c.pass; });
  rep.certified = rep.valid && cert.eta_from_table;
  return rep;
}

}  // namespace hlc
