// hlc: sweep, single certificates, SDP solves, shrinking factors, re-verification.
//
// Exit codes: 0 verified, 2 certificate failure, 3 usage error, 1 anything else
// (I/O, solver breakdown).

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hlc/analytic_certs.hpp"
#include "hlc/error.hpp"
#include "hlc/lhs_sdp.hpp"
#include "hlc/measurements.hpp"
#include "hlc/serialize.hpp"
#include "hlc/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitCertificate = 2;
constexpr int kExitUsage = 3;

struct SweepArgs {
  hlc::SweepConfig cfg;
  std::string eta_source = "table";
  std::string p_mode = "fixed";
  std::string out_prefix;
  bool bisection = false;
  bool timings = false;
};

struct CertifyArgs {
  double alpha = 0.0;
  double theta = 0.0;
  std::string technique = "auto";
  std::string from_cert;
  double q = 0.5;
  double beta = 0.75;
  std::string out;
};

struct SdpArgs {
  double theta = 0.0;
  std::optional<double> eta;
  double p = 0.0;
  double tol = 1e-9;
  bool bisection = false;
  bool strict_chi = false;
  std::string out;
};

struct ShrinkArgs {
  std::vector<double> ps;
  double resolution = 0.005;
};

struct VerdictArgs {
  double alpha = 0.0;
  std::string sweep_file;
  std::vector<double> fa{1, 0, 0, 1};
  std::vector<double> fb{1, 0, 0, 1};
};

void print_report(const hlc::VerificationReport& r) {
  for (const auto& c : r.checks)
    std::printf("  %-28s %s  value=% .3e  tol=%.1e\n", c.name.c_str(), c.pass ? "ok  " : "FAIL", c.value,
                c.tolerance);
  std::printf("  => %s, %s\n", r.valid ? "valid" : "INVALID", r.certified ? "certified" : "not certified");
}

int exit_for(const hlc::VerificationReport& r) { return r.valid ? kExitOk : kExitCertificate; }

void write_json(const std::string& path, const hlc::Json& j) {
  hlc::write_text_file(path, j.dump(2) + "\n");
  std::printf("wrote %s\n", path.c_str());
}

int run_sweep(SweepArgs& a) {
  auto& cfg = a.cfg;
  if (a.eta_source != "table" && a.eta_source != "computed") throw hlc::DomainError("--eta-source: table|computed");
  if (a.p_mode != "fixed" && a.p_mode != "best") throw hlc::DomainError("--p-mode: fixed|best");
  cfg.eta_source = a.eta_source == "table" ? hlc::EtaSource::Table : hlc::EtaSource::Computed;
  cfg.p_mode = a.p_mode == "fixed" ? hlc::PMode::Fixed : hlc::PMode::Best;
  cfg.sdp.mode = a.bisection ? hlc::SdpMode::Bisection : hlc::SdpMode::Direct;
  cfg.validate();

  const hlc::SweepResult r = hlc::sweep(cfg);

  std::printf("config hash  %016llx\n", static_cast<unsigned long long>(cfg.hash()));
  std::printf("records      %zu (%zu SDP certificates, %zu decompositions)\n", r.records.size(),
              r.sdp_certificates.size(), r.decompositions.size());
  for (const auto& [name, v] : r.technique_minima) std::printf("  min %-7s  %.6f\n", name.c_str(), v);
  if (r.alpha_c)
    std::printf("alpha_c      %.6f   (reported elsewhere: %.4f / %.4f)\n", *r.alpha_c,
                hlc::SweepResult::kReportedAlphaCHigh, hlc::SweepResult::kReportedAlphaCLow);
  else
    std::printf("alpha_c      n/a (no interval enabled)\n");
  std::printf("certified    %s%s\n", r.certified ? "yes" : "no (computed eta)",
              r.refinement_capped ? ", refinement capped" : "");
  std::printf("time         %.2f s\n", r.timings.total_seconds);

  if (!a.out_prefix.empty()) {
    hlc::write_text_file(a.out_prefix + ".csv", hlc::emit_csv(r));
    std::printf("wrote %s.csv\n", a.out_prefix.c_str());
    write_json(a.out_prefix + ".json", hlc::sweep_to_json(r, a.timings));
  }
  return kExitOk;
}

int run_certify(const CertifyArgs& a) {
  std::string tech = a.technique;
  hlc::DecompositionCertificate cert;

  if (!a.from_cert.empty()) {
    // Lemma 1 from a stored certificate: its (q*, theta) is the reference.
    const auto any = hlc::certificate_from_json(hlc::read_json_file(a.from_cert));
    const auto base = hlc::verify_any(any);
    if (!base.valid) {
      std::printf("base certificate does not verify\n");
      print_report(base);
      return kExitCertificate;
    }
    double a0 = 0.0, t0 = 0.0;
    if (const auto* l = std::get_if<hlc::LoadedLhsCertificate>(&any)) {
      a0 = l->certificate.q_certified;
      t0 = l->certificate.theta;
    } else {
      const auto& d = std::get<hlc::DecompositionCertificate>(any);
      a0 = d.target_alpha;
      t0 = d.target_theta;
    }
    std::printf("base point   alpha=%.10f theta=%.10f, max alpha at %.10f: %.10f\n", a0, t0, a.theta,
                hlc::lemma1_max_alpha(a0, t0, a.theta));
    cert = hlc::lemma1_certificate(a0, t0, a.alpha, a.theta);
  } else if (tech == "i3") {
    cert = hlc::i3_certificate(a.alpha, a.theta);
  } else if (tech == "i1") {
    cert = hlc::i1_certificate(a.alpha, a.theta, a.q, a.beta);
  } else if (tech == "lemma1") {
    throw hlc::DomainError("--technique lemma1 needs --from-cert");
  } else if (tech == "auto") {
    cert = hlc::i3_certificate(a.alpha, a.theta);
    if (!cert.valid) {
      auto alt = hlc::i1_certificate(a.alpha, a.theta, a.q, a.beta);
      if (alt.valid) cert = std::move(alt);
    }
  } else {
    throw hlc::DomainError("--technique: auto|i1|i3|lemma1");
  }

  std::printf("technique    %s\n", hlc::to_string(cert.technique));
  std::printf("target       alpha=%.10f theta=%.10f  q=%.10f\n", cert.target_alpha, cert.target_theta, cert.q);
  if (!cert.failure.empty()) std::printf("failure      %s\n", cert.failure.c_str());
  const auto rep = hlc::verify_decomposition(cert);
  print_report(rep);
  if (!a.out.empty()) write_json(a.out, hlc::certificate_to_json(cert));
  return exit_for(rep);
}

int run_sdp(const SdpArgs& a) {
  const auto ms = hlc::icosahedron_set();
  hlc::LhsSdpOptions o;
  o.mode = a.bisection ? hlc::SdpMode::Bisection : hlc::SdpMode::Direct;
  o.strict_chi = a.strict_chi;
  o.solver.gap_tol = a.tol;
  o.solver.feas_tol = a.tol;
  double eta = 0.0;
  if (a.eta) {
    eta = *a.eta;
    if (!hlc::published_shrinking_factor(a.p)) o.eta_bound = eta;
  } else {
    const auto t = hlc::published_shrinking_factor(a.p);
    if (!t) throw hlc::DomainError("no tabulated eta for this p; pass --eta");
    eta = *t;
  }
  const auto cert = hlc::solve_protocol1(a.theta, eta, a.p, ms, o);
  std::printf("theta=%.10f eta=%.4f p=%.4f\n", cert.theta, cert.eta, cert.p);
  std::printf("q* solver    %.10f\nq* certified %.10f  (backoff %.2e, %d iterations, gap %.1e)\n", cert.q_solver,
              cert.q_certified, cert.backoff, cert.iterations, cert.relative_gap);
  const auto rep = hlc::verify_certificate(cert, ms);
  print_report(rep);
  if (!a.out.empty()) write_json(a.out, hlc::certificate_to_json(cert, ms));
  return exit_for(rep);
}

int run_shrink(const ShrinkArgs& a) {
  std::vector<double> ps = a.ps;
  if (ps.empty())
    for (const auto& [p, eta] : hlc::published_shrinking_table()) ps.push_back(p);
  const auto family = hlc::relabeled_family(hlc::icosahedron_set());
  const auto rows = hlc::shrinking_factor_table(family, ps, a.resolution);
  std::printf("%6s %10s %10s %10s %8s\n", "p", "upper", "estimate", "published", "tested");
  for (const auto& r : rows) {
    const auto pub = hlc::published_shrinking_factor(r.p);
    std::printf("%6.2f %10.4f %10.4f %10s %8zu\n", r.p, r.eta_upper_bound, r.eta_lower_estimate,
                pub ? (std::to_string(*pub).substr(0, 4)).c_str() : "-", r.povms_tested);
  }
  return kExitOk;
}

int verify_sweep(const hlc::Json& j) {
  const auto r = hlc::sweep_from_json(j);
  const auto ms = hlc::icosahedron_set();
  int bad = 0;
  for (std::size_t i = 0; i < r.sdp_certificates.size(); ++i) {
    const auto rep = hlc::verify_any(hlc::LoadedLhsCertificate{r.sdp_certificates[i], ms});
    if (!rep.valid) {
      ++bad;
      std::printf("SDP certificate %zu (theta=%.6f): %s\n", i, r.sdp_certificates[i].theta, rep.summary().c_str());
    }
  }
  for (std::size_t i = 0; i < r.decompositions.size(); ++i) {
    const auto rep = hlc::verify_decomposition(r.decompositions[i]);
    if (!rep.valid) {
      ++bad;
      std::printf("decomposition %zu (theta=%.6f): %s\n", i, r.decompositions[i].target_theta, rep.summary().c_str());
    }
  }
  // Records must not claim more than their certificate delivers.
  double lowest = INFINITY;
  for (const auto& rec : r.records) {
    lowest = std::min(lowest, rec.alpha_certified);
    if (rec.cert_kind == hlc::CertKind::LhsSdp &&
        rec.alpha_certified > r.sdp_certificates[rec.cert_index].q_certified + 1e-12) {
      ++bad;
      std::printf("record at theta=%.6f exceeds its SDP certificate\n", rec.theta);
    }
    if (rec.cert_kind == hlc::CertKind::Decomposition &&
        rec.alpha_certified > r.decompositions[rec.cert_index].target_alpha + 1e-12) {
      ++bad;
      std::printf("record at theta=%.6f exceeds its decomposition\n", rec.theta);
    }
  }
  if (r.alpha_c && std::abs(*r.alpha_c - lowest) > 1e-12) {
    ++bad;
    std::printf("alpha_c %.12f differs from the record minimum %.12f\n", *r.alpha_c, lowest);
  }
  std::printf("sweep: %zu records, %zu + %zu certificates, %d failure(s)\n", r.records.size(),
              r.sdp_certificates.size(), r.decompositions.size(), bad);
  return bad == 0 ? kExitOk : kExitCertificate;
}

int run_verify(const std::vector<std::string>& files) {
  int rc = kExitOk;
  for (const auto& f : files) {
    std::printf("%s\n", f.c_str());
    const auto j = hlc::read_json_file(f);
    const std::string schema = j.value("schema", "");
    int code;
    if (schema == hlc::kSweepSchema) {
      code = verify_sweep(j);
    } else {
      const auto rep = hlc::verify_any(hlc::certificate_from_json(j));
      print_report(rep);
      code = exit_for(rep);
    }
    rc = std::max(rc, code);
  }
  return rc;
}

hlc::ComplexMatrix filter_from(const std::vector<double>& v, const char* flag) {
  if (v.size() % 2 != 0 || v.size() < 2 || v.size() > 8)
    throw hlc::DomainError(std::string(flag) + ": give 2*d real entries, row-major, d in 1..4");
  const long d = static_cast<long>(v.size() / 2);
  hlc::ComplexMatrix m(d, 2);
  for (long i = 0; i < d; ++i)
    for (long k = 0; k < 2; ++k) m(i, k) = v[static_cast<std::size_t>(2 * i + k)];
  return m;
}

int run_verdict(const VerdictArgs& a) {
  const auto r = hlc::sweep_from_json(hlc::read_json_file(a.sweep_file));
  const auto v = hlc::verdict(a.alpha, filter_from(a.fa, "--fa"), filter_from(a.fb, "--fb"), r);
  std::printf("verdict      %s\n", hlc::to_string(v.verdict));
  std::printf("normal form  alpha=%.10f theta=%.10f  p_success=%.6f\n", v.alpha, v.theta, v.success_probability);
  if (v.certified_alpha) std::printf("certified    %.10f\n", *v.certified_alpha);
  for (const auto& step : v.chain) std::printf("  - %s\n", step.c_str());
  if (!v.reason.empty()) std::printf("reason       %s\n", v.reason.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hidden-nonlocality certificates for filtered Werner states"};
  app.set_config("--config", "", "key = value file; [section] headers select a subcommand");
  app.require_subcommand(1);

  SweepArgs sw;
  auto* c_sweep = app.add_subcommand("sweep", "Certify visibilities over theta in [0, pi/4]");
  c_sweep->add_option("--grid", sw.cfg.grid, "uniform SDP points on [theta_s, theta_l]")->capture_default_str();
  c_sweep->add_option("--theta-s", sw.cfg.theta_s)->capture_default_str();
  c_sweep->add_option("--theta-l", sw.cfg.theta_l)->capture_default_str();
  c_sweep->add_option("--p", sw.cfg.p, "xi_A parameter")->capture_default_str();
  c_sweep->add_option("--p-mode", sw.p_mode, "fixed|best")->capture_default_str();
  c_sweep->add_option("--eta-source", sw.eta_source, "table|computed")->capture_default_str();
  c_sweep->add_option("--max-loss", sw.cfg.max_interp_loss, "refine gaps losing more (0: uniform grid)")
      ->capture_default_str();
  c_sweep->add_option("--max-points", sw.cfg.max_grid_points)->capture_default_str();
  c_sweep->add_option("--i1-points", sw.cfg.i1_points)->capture_default_str();
  c_sweep->add_option("--i3-points", sw.cfg.i3_points)->capture_default_str();
  c_sweep->add_option("--shrink-resolution", sw.cfg.shrink_resolution)->capture_default_str();
  c_sweep->add_flag("!--no-i1", sw.cfg.enable_i1);
  c_sweep->add_flag("!--no-i2", sw.cfg.enable_i2);
  c_sweep->add_flag("!--no-i3", sw.cfg.enable_i3);
  c_sweep->add_option("--threads", sw.cfg.threads, "0: HLC_THREADS or hardware");
  c_sweep->add_flag("--bisection", sw.bisection, "feasibility bisection instead of direct maximization");
  c_sweep->add_flag("--timings", sw.timings, "include timings in the JSON (breaks byte-identity)");
  c_sweep->add_option("--out-prefix", sw.out_prefix, "write PREFIX.csv and PREFIX.json");

  CertifyArgs ce;
  auto* c_cert = app.add_subcommand("certify", "Closed-form certificate at one (alpha, theta)");
  c_cert->add_option("--alpha", ce.alpha)->required();
  c_cert->add_option("--theta", ce.theta)->required();
  c_cert->add_option("--technique", ce.technique, "auto|i1|i3|lemma1")->capture_default_str();
  c_cert->add_option("--from-cert", ce.from_cert, "lemma1 base: a stored certificate")->check(CLI::ExistingFile);
  c_cert->add_option("--q", ce.q, "i1 mixing weight")->capture_default_str();
  c_cert->add_option("--beta", ce.beta, "i1 reference visibility")->capture_default_str();
  c_cert->add_option("--out", ce.out, "write the certificate JSON");

  SdpArgs sd;
  auto* c_sdp = app.add_subcommand("sdp", "Solve the LHS SDP at one theta");
  c_sdp->add_option("--theta", sd.theta)->required();
  c_sdp->add_option("--eta", sd.eta, "default: tabulated value for --p");
  c_sdp->add_option("--p", sd.p)->capture_default_str();
  c_sdp->add_option("--tol", sd.tol)->capture_default_str();
  c_sdp->add_flag("--bisection", sd.bisection);
  c_sdp->add_flag("--strict-chi", sd.strict_chi, "also require chi >= 0");
  c_sdp->add_option("--out", sd.out, "write the certificate JSON");

  ShrinkArgs sh;
  auto* c_shrink = app.add_subcommand("shrink", "Estimate shrinking factors of the icosahedron family");
  c_shrink->add_option("--p", sh.ps, "p values (default: tabulated ones)");
  c_shrink->add_option("--resolution", sh.resolution)->capture_default_str();

  std::vector<std::string> files;
  auto* c_verify = app.add_subcommand("verify", "Re-verify certificate or sweep JSON files");
  c_verify->add_option("files", files)->required()->check(CLI::ExistingFile);

  VerdictArgs ve;
  auto* c_verdict = app.add_subcommand("verdict", "Locality verdict for filtered Werner states");
  c_verdict->add_option("--alpha", ve.alpha)->required();
  c_verdict->add_option("--sweep", ve.sweep_file, "sweep JSON")->required()->check(CLI::ExistingFile);
  c_verdict->add_option("--fa", ve.fa, "Alice filter, d x 2 real row-major")->delimiter(',');
  c_verdict->add_option("--fb", ve.fb, "Bob filter, d x 2 real row-major")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*c_sweep) return run_sweep(sw);
    if (*c_cert) return run_certify(ce);
    if (*c_sdp) return run_sdp(sd);
    if (*c_shrink) return run_shrink(sh);
    if (*c_verify) return run_verify(files);
    if (*c_verdict) return run_verdict(ve);
  } catch (const hlc::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const hlc::CertificateError& e) {
    std::cerr << "certificate failure: " << e.what() << "\n";
    return kExitCertificate;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  }
  return kExitUsage;
}
