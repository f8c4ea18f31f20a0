#include "hlc/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <map>
#include <sstream>
#include <thread>

#include "hlc/error.hpp"
#include "hlc/measurements.hpp"

namespace hlc {

const char* to_string(EtaSource s) { return s == EtaSource::Table ? "table" : "computed"; }
const char* to_string(PMode m) { return m == PMode::Fixed ? "fixed" : "best"; }
const char* to_string(Verdict v) {
  return v == Verdict::UnsteerableAfterFiltering ? "UNSTEERABLE-AFTER-FILTERING" : "UNKNOWN";
}

void SweepConfig::validate() const {
  if (!(theta_s > 0.0 && theta_s < theta_l && theta_l < kQuarterPi))
    throw DomainError("sweep: need 0 < theta_s < theta_l < pi/4");
  if (grid < 0 || i1_points < 0 || i3_points < 0) throw DomainError("sweep: point counts must be >= 0");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("sweep: p outside [0, 1]");
  if (eta_source == EtaSource::Table && p_mode == PMode::Fixed && !published_shrinking_factor(p))
    throw DomainError("sweep: p has no published shrinking factor; use a listed p or computed eta");
  if (!(shrink_resolution > 0.0)) throw DomainError("sweep: shrink resolution must be > 0");
  if (!(max_interp_loss >= 0.0) || !(min_spacing > 0.0) || max_grid_points < grid)
    throw DomainError("sweep: invalid grid refinement settings");
  if (!(i1.q > 0.0 && i1.q < 1.0) || !(i1.alpha >= 0.0 && i1.alpha <= 1.0) || !(i1.beta > 0.0 && i1.beta <= 1.0))
    throw DomainError("sweep: invalid small-theta parameters");
}

std::string SweepConfig::canonical() const {
  char buf[768];
  std::snprintf(buf, sizeof buf,
                "theta_s=%.17g;theta_l=%.17g;grid=%d;max_loss=%.17g;min_spacing=%.17g;max_points=%d;i1_points=%d;i3_points=%d;eta_source=%s;p=%.17g;"
                "p_mode=%s;shrink_resolution=%.17g;i1_alpha=%.17g;i1_q=%.17g;i1_beta=%.17g;"
                "enable=%d%d%d;sdp_mode=%s;strict_chi=%d;gap_tol=%.17g;feas_tol=%.17g",
                theta_s, theta_l, grid, max_interp_loss, min_spacing, max_grid_points, i1_points, i3_points, to_string(eta_source), p, to_string(p_mode),
                shrink_resolution, i1.alpha, i1.q, i1.beta, enable_i1, enable_i2, enable_i3,
                sdp.mode == SdpMode::Direct ? "direct" : "bisection", sdp.strict_chi, sdp.solver.gap_tol,
                sdp.solver.feas_tol);
  return buf;
}

std::uint64_t SweepConfig::hash() const {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : canonical()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::vector<double> uniform_grid(double a, double b, int count) {
  std::vector<double> out;
  if (count <= 0) return out;
  if (count == 1) return {a};
  for (int i = 0; i < count; ++i) out.push_back(i == count - 1 ? b : a + (b - a) * i / (count - 1));
  return out;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("HLC_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

int technique_rank(const std::string& t) {
  if (t == "I1") return 0;
  if (t == "SDP") return 1;
  if (t == "LEMMA1") return 2;
  return 3;
}

// Runs fn(i) for i in [0, n) on up to `threads` workers; rethrows the
// exception of the lowest failing index so failures are reproducible.
template <class Fn>
void parallel_for(int n, int threads, Fn fn) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  const int t = std::max(1, std::min(threads, n));
  std::vector<std::thread> pool;
  for (int k = 1; k < t; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

[[noreturn]] void abort_at(double theta, const std::string& what) {
  std::ostringstream os;
  os.precision(12);
  os << "sweep aborted at theta=" << theta << ": " << what;
  throw CertificateError(os.str());
}

void require_valid(const DecompositionCertificate& c, double theta) {
  const VerificationReport rep = verify_decomposition(c);
  if (!c.valid || !rep.valid) abort_at(theta, c.failure.empty() ? rep.summary() : c.failure);
}

}  // namespace

SweepResult sweep(const SweepConfig& cfg) {
  cfg.validate();
  const auto t_start = Clock::now();
  SweepResult res;
  res.config = cfg;
  const int threads = resolve_threads(cfg.threads);
  const MeasurementSet ms = icosahedron_set();

  // (p, eta) rows for the SDP interval.
  std::vector<std::pair<double, double>> rows;
  if (cfg.enable_i2) {
    std::vector<double> ps;
    if (cfg.p_mode == PMode::Fixed)
      ps = {cfg.p};
    else
      for (const auto& [p, eta] : published_shrinking_table()) ps.push_back(p);
    if (cfg.eta_source == EtaSource::Table) {
      for (double p : ps) rows.emplace_back(p, *published_shrinking_factor(p));
    } else {
      const auto t0 = Clock::now();
      const auto est = shrinking_factor_table(relabeled_family(ms, 4), ps, cfg.shrink_resolution);
      for (const auto& e : est) rows.emplace_back(e.p, e.eta_lower_estimate);
      res.certified = false;
      res.timings.shrink_seconds = seconds_since(t0);
    }
  }
  res.eta_used = rows;

  // I2: SDP at grid points, Lemma 1 across gaps.
  const auto t2 = Clock::now();
  std::map<double, LhsSdpCertificate> solved;
  auto solve_points = [&](const std::vector<double>& pts) {
    std::vector<LhsSdpCertificate> best(pts.size());
    parallel_for(static_cast<int>(pts.size()), threads, [&](int k) {
      const double th = pts[static_cast<std::size_t>(k)];
      bool have = false;
      for (const auto& [p, eta] : rows) {
        LhsSdpOptions o = cfg.sdp;
        if (cfg.eta_source == EtaSource::Computed) o.eta_bound = eta;
        LhsSdpCertificate c;
        try {
          c = solve_protocol1(th, eta, p, ms, o);
        } catch (const Error& e) {
          abort_at(th, e.what());
        }
        const VerificationReport rep = verify_certificate(c, ms);
        if (!rep.valid) abort_at(th, rep.summary());
        if (!have || c.q_certified > best[static_cast<std::size_t>(k)].q_certified) {
          best[static_cast<std::size_t>(k)] = std::move(c);
          have = true;
        }
      }
    });
    for (std::size_t k = 0; k < pts.size(); ++k) solved.emplace(pts[k], std::move(best[k]));
  };
  if (cfg.enable_i2) solve_points(uniform_grid(cfg.theta_s, cfg.theta_l, cfg.grid));

  // Bisect lossy gaps until every Lemma-1 step loses at most max_interp_loss.
  while (cfg.enable_i2 && cfg.max_interp_loss > 0.0 && solved.size() >= 2) {
    std::vector<double> mids;
    for (auto it = solved.begin(); std::next(it) != solved.end(); ++it) {
      const auto nx = std::next(it);
      const double q = it->second.q_certified;
      if (q - lemma1_max_alpha(q, it->first, nx->first) <= cfg.max_interp_loss) continue;
      if (nx->first - it->first < 2.0 * cfg.min_spacing) {
        res.refinement_capped = true;
        continue;
      }
      mids.push_back(0.5 * (it->first + nx->first));
    }
    if (mids.empty()) break;
    if (solved.size() + mids.size() > static_cast<std::size_t>(cfg.max_grid_points)) {
      res.refinement_capped = true;
      break;
    }
    solve_points(mids);
  }

  std::vector<double> grid;
  std::vector<LhsSdpCertificate> best;
  for (auto& [th, c] : solved) {
    grid.push_back(th);
    best.push_back(std::move(c));
  }
  for (std::size_t k = 0; k < grid.size(); ++k) {
    res.sdp_certificates.push_back(best[k]);
    res.records.push_back({grid[k], grid[k], grid[k], best[k].q_certified, "SDP", CertKind::LhsSdp,
                           static_cast<int>(k)});
  }
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double q = best[k].q_certified;
    const double a = lemma1_max_alpha(q, grid[k], grid[k + 1]);
    DecompositionCertificate c = lemma1_certificate(q, grid[k], a, grid[k + 1]);
    require_valid(c, grid[k + 1]);
    res.decompositions.push_back(std::move(c));
    res.records.push_back({grid[k + 1], grid[k], grid[k + 1], a, "LEMMA1", CertKind::Decomposition,
                           static_cast<int>(res.decompositions.size() - 1)});
  }
  res.timings.i2_seconds = seconds_since(t2);

  // I1: fixed construction; published as min(alpha, SDP guarantee at theta_s).
  const auto t1 = Clock::now();
  if (cfg.enable_i1) {
    double a = cfg.i1.alpha;
    if (!grid.empty()) a = std::min(a, best.front().q_certified);
    for (double th : uniform_grid(0.0, cfg.theta_s, cfg.i1_points)) {
      DecompositionCertificate c = i1_certificate(th, cfg.i1);
      require_valid(c, th);
      res.decompositions.push_back(std::move(c));
      res.records.push_back({th, 0.0, cfg.theta_s, a, "I1", CertKind::Decomposition,
                             static_cast<int>(res.decompositions.size() - 1)});
    }
  }
  res.timings.i1_seconds = seconds_since(t1);

  // I3: the bound increases with theta, so each point covers up to the next.
  const auto t3 = Clock::now();
  if (cfg.enable_i3) {
    const auto pts = uniform_grid(cfg.theta_l, kQuarterPi, cfg.i3_points);
    for (std::size_t j = 0; j < pts.size(); ++j) {
      const double a = i3_alpha_bound(pts[j]);
      DecompositionCertificate c = i3_certificate(std::min(a, 1.0), pts[j]);
      require_valid(c, pts[j]);
      res.decompositions.push_back(std::move(c));
      res.records.push_back({pts[j], pts[j], j + 1 < pts.size() ? pts[j + 1] : pts[j], a, "I3",
                             CertKind::Decomposition, static_cast<int>(res.decompositions.size() - 1)});
    }
  }
  res.timings.i3_seconds = seconds_since(t3);

  std::stable_sort(res.records.begin(), res.records.end(), [](const SweepRecord& a, const SweepRecord& b) {
    if (a.theta != b.theta) return a.theta < b.theta;
    return technique_rank(a.technique) < technique_rank(b.technique);
  });

  std::map<std::string, double> minima;
  for (const auto& r : res.records) {
    auto it = minima.find(r.technique);
    if (it == minima.end() || r.alpha_certified < it->second) minima[r.technique] = r.alpha_certified;
    if (!res.alpha_c || r.alpha_certified < *res.alpha_c) res.alpha_c = r.alpha_certified;
  }
  for (const char* t : {"I1", "SDP", "LEMMA1", "I3"})
    if (auto it = minima.find(t); it != minima.end()) res.technique_minima.emplace_back(t, it->second);
  res.timings.total_seconds = seconds_since(t_start);
  return res;
}

namespace {

struct Located {
  double alpha = 0.0;
  std::string technique;
  int sdp_index = -1;  // grid point the Lemma-1 step starts from
};

std::optional<Located> locate(const SweepResult& r, double theta) {
  std::optional<Located> best;
  auto offer = [&](Located l) {
    if (!best || l.alpha > best->alpha) best = std::move(l);
  };
  const SweepConfig& cfg = r.config;
  std::vector<std::pair<double, int>> sdp;  // (theta_k, index)
  for (const auto& rec : r.records)
    if (rec.technique == "SDP") sdp.emplace_back(rec.theta, rec.cert_index);

  for (const auto& rec : r.records)
    if (rec.technique == "I1" && theta <= cfg.theta_s) {
      offer({rec.alpha_certified, "I1", -1});
      break;
    }
  for (std::size_t k = 0; k < sdp.size(); ++k) {
    const double tk = sdp[k].first;
    const double q = r.sdp_certificates[static_cast<std::size_t>(sdp[k].second)].q_certified;
    if (theta == tk) offer({q, "SDP", sdp[k].second});
    if (k + 1 < sdp.size() && theta > tk && theta <= sdp[k + 1].first)
      offer({lemma1_max_alpha(q, tk, theta), "LEMMA1", sdp[k].second});
  }
  if (cfg.enable_i3 && theta >= cfg.theta_l && theta <= kQuarterPi + 1e-12)
    offer({std::min(1.0, i3_alpha_bound(theta)), "I3", -1});
  return best;
}

}  // namespace

std::optional<double> SweepResult::guarantee_at(double theta) const {
  if (auto l = locate(*this, theta)) return l->alpha;
  return std::nullopt;
}

VerdictReport verdict(double alpha, const ComplexMatrix& f_a, const ComplexMatrix& f_b,
                      const SweepResult& sw) {
  VerdictReport rep;
  rep.alpha = alpha;
  const FilterPair filters(f_a, f_b);
  const DensityMatrix rho = werner(WernerParams(alpha));
  rep.success_probability = apply_filters(rho, filters).success_prob;

  const NormalForm nf = filter_normal_form(f_a, alpha);
  rep.theta = nf.params.theta();
  const std::string bob_step =
      "Bob-side filter F_B (and the local unitary V^*) is a local operation on the "
      "trusted side and preserves unsteerability from Alice to Bob [cited, not computed]";
  const std::string lhv_step = "an LHS model is in particular an LHV model, so the filtered state is local [cited]";

  if (nf.separable_output) {
    rep.verdict = Verdict::UnsteerableAfterFiltering;
    rep.certified_alpha = 1.0;
    rep.chain = {"filter normal form: F_A has rank 1, so Alice's filtered side is a fixed pure state and "
                 "the filtered state is a product state [computed]",
                 "product states admit a trivial LHS model [computed]", bob_step, lhv_step};
    return rep;
  }

  std::ostringstream nf_step;
  nf_step.precision(12);
  nf_step << "filter normal form: F_A = U D V^dagger with singular values (" << nf.singular_values(0) << ", "
          << nf.singular_values(1) << "); filtered state is locally equivalent to rho(alpha=" << alpha
          << ", theta=" << rep.theta << ") [computed]";
  rep.chain.push_back(nf_step.str());

  const auto loc = locate(sw, rep.theta);
  if (!loc) {
    rep.chain.clear();
    rep.reason = "theta = " + fmt(rep.theta) + " lies outside every interval covered by the sweep";
    return rep;
  }
  rep.certified_alpha = loc->alpha;
  if (alpha > loc->alpha) {
    rep.chain.clear();
    rep.reason = "alpha = " + fmt(alpha) + " exceeds the certified visibility " + fmt(loc->alpha) +
                 " at theta = " + fmt(rep.theta) + " (" + loc->technique + ")";
    return rep;
  }

  const double th = rep.theta;
  if (loc->technique == "I1") {
    DecompositionCertificate c = i1_certificate(th, sw.config.i1);
    if (!c.valid || !verify_decomposition(c).valid) {
      rep.chain.clear();
      rep.reason = "small-theta certificate failed at theta = " + fmt(th) + ": " + c.failure;
      return rep;
    }
    rep.chain.push_back("rho(" + fmt(sw.config.i1.alpha) + ", theta) = q rho_theta + (1-q) S with S PSD and PPT, "
                        "q = " + fmt(c.q) + " [computed, re-verified]");
    rep.chain.push_back("rho_theta admits an LHS model for all projective measurements and hence all POVMs "
                        "when the beta-theta condition holds (margin " + fmt(c.diagnostics.front().second) +
                        ") [condition computed, model cited]");
    rep.local_certificate = std::move(c);
  } else if (loc->technique == "I3") {
    DecompositionCertificate c = i3_certificate(loc->alpha, th);
    if (!c.valid || !verify_decomposition(c).valid) {
      rep.chain.clear();
      rep.reason = "Werner-mixture certificate failed at theta = " + fmt(th) + ": " + c.failure;
      return rep;
    }
    rep.chain.push_back("rho(" + fmt(loc->alpha) + ", theta) = q rho_W(5/12) + (1-q) S with S diagonal, q = " +
                        fmt(c.q) + " [computed, re-verified]");
    rep.chain.push_back("rho_W(5/12) admits an LHS model for all POVMs [cited]");
    rep.local_certificate = std::move(c);
  } else {
    const LhsSdpCertificate& sc = sw.sdp_certificates.at(static_cast<std::size_t>(loc->sdp_index));
    rep.sdp_certificate_index = loc->sdp_index;
    if (loc->technique == "LEMMA1") {
      DecompositionCertificate c = lemma1_certificate(sc.q_certified, sc.theta, loc->alpha, th);
      if (!c.valid || !verify_decomposition(c).valid) {
        rep.chain.clear();
        rep.reason = "interpolation certificate failed at theta = " + fmt(th) + ": " + c.failure;
        return rep;
      }
      rep.chain.push_back("rho(" + fmt(loc->alpha) + ", theta) = q rho(" + fmt(sc.q_certified) + ", " +
                          fmt(sc.theta) + ") + (1-q) S with S diagonal [computed, re-verified]");
      rep.local_certificate = std::move(c);
    }
    rep.chain.push_back("rho(" + fmt(sc.q_certified) + ", " + fmt(sc.theta) +
                        ") = eta chi + (1-eta) xi_A (x) chi_B + R with a finite-set LHS model for chi and R PPT, "
                        "eta = " + fmt(sc.eta) + (sc.eta_from_table ? " (published shrinking factor)" :
                                                  " (computed shrinking factor, not certified)") +
                        " [computed, re-verified]");
  }
  if (alpha < loc->alpha)
    rep.chain.push_back("rho(alpha, theta) is a convex mixture of rho(" + fmt(loc->alpha) +
                        ", theta) and the product state rho(0, theta) [computed]");
  rep.chain.push_back(bob_step);
  rep.chain.push_back(lhv_step);
  rep.verdict = Verdict::UnsteerableAfterFiltering;
  return rep;
}

std::string emit_csv(const SweepResult& result) {
  std::string out = "theta,alpha_certified,technique\n";
  for (const auto& r : result.records) out += fmt(r.theta) + "," + fmt(r.alpha_certified) + "," + r.technique + "\n";
  return out;
}

}  // namespace hlc
