#include "hlc/measurements.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "hlc/error.hpp"
#include "hlc/simplex.hpp"

namespace hlc {

// ---------------------------------------------------------------------------
// Povm / MeasurementSet

Povm::Povm(std::vector<HermitianMatrix> elements, std::string label)
    : elements_(std::move(elements)), label_(std::move(label)) {
  if (elements_.empty()) throw DomainError("Povm: no elements");
  ComplexMatrix sum = ComplexMatrix::Zero(2, 2);
  for (const auto& e : elements_) {
    if (e.dim() != 2) throw DomainError("Povm: elements must be 2x2");
    const double lmin = min_eigenvalue(e);
    if (lmin < -1e-10) {
      std::ostringstream os;
      os << "Povm '" << label_ << "': element not PSD (min eigenvalue " << lmin << ")";
      throw NumericalError(os.str());
    }
    sum += e.matrix();
  }
  const double dev = max_abs_distance(sum, identity2());
  if (dev > 1e-10) {
    std::ostringstream os;
    os << "Povm '" << label_ << "': elements sum to identity only within " << dev;
    throw NumericalError(os.str());
  }
}

Povm Povm::projective(const Eigen::Vector3d& n, std::string label) {
  const Eigen::Vector3d u = n.normalized();
  return Povm({HermitianMatrix(bloch_operator(1.0, u)), HermitianMatrix(bloch_operator(1.0, -u))},
              std::move(label));
}

Povm Povm::padded(std::size_t k) const {
  if (k < elements_.size()) throw DomainError("Povm::padded: cannot drop outcomes");
  std::vector<HermitianMatrix> e = elements_;
  while (e.size() < k) e.push_back(HermitianMatrix::zero(2));
  return Povm(std::move(e), label_);
}

std::vector<std::size_t> Povm::nonzero_outcomes(double tol) const {
  std::vector<std::size_t> out;
  for (std::size_t a = 0; a < elements_.size(); ++a)
    if (elements_[a].trace() > tol) out.push_back(a);
  return out;
}

MeasurementSet::MeasurementSet(std::vector<Povm> povms, std::string id)
    : povms_(std::move(povms)), id_(std::move(id)) {}

std::size_t MeasurementSet::max_outcomes() const {
  std::size_t k = 0;
  for (const auto& m : povms_) k = std::max(k, m.outcomes());
  return k;
}

// ---------------------------------------------------------------------------
// Icosahedron

std::vector<Eigen::Vector3d> icosahedron_vertices() {
  const double phi = std::numbers::phi;
  std::vector<Eigen::Vector3d> v;
  for (double s1 : {1.0, -1.0})
    for (double s2 : {1.0, -1.0}) {
      v.emplace_back(0.0, s1, s2 * phi);
      v.emplace_back(s1, s2 * phi, 0.0);
      v.emplace_back(s2 * phi, 0.0, s1);
    }
  for (auto& x : v) x.normalize();
  return v;
}

std::vector<Eigen::Vector3d> icosahedron_upper_vertices() {
  std::vector<Eigen::Vector3d> out;
  for (const auto& v : icosahedron_vertices()) {
    const bool upper = v.z() > 1e-12 || (std::abs(v.z()) <= 1e-12 && v.y() > 0.0);
    if (upper) out.push_back(v);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (std::abs(a.z() - b.z()) > 1e-12) return a.z() > b.z();
    if (std::abs(a.x() - b.x()) > 1e-12) return a.x() > b.x();
    return a.y() > b.y();
  });
  return out;
}

MeasurementSet icosahedron_set() {
  std::vector<Povm> povms;
  const auto verts = icosahedron_upper_vertices();
  for (std::size_t i = 0; i < verts.size(); ++i)
    povms.push_back(Povm::projective(verts[i], "ico" + std::to_string(i)));
  return MeasurementSet(std::move(povms), "icosahedron");
}

MeasurementSet relabeled_family(const MeasurementSet& active, std::size_t outcomes) {
  std::vector<Povm> family;
  auto same = [](const Povm& a, const Povm& b) {
    for (std::size_t k = 0; k < a.outcomes(); ++k)
      if (max_abs_distance(a.element(k).matrix(), b.element(k).matrix()) > 1e-14) return false;
    return true;
  };
  auto add_relabelings = [&](const Povm& base) {
    const Povm p = base.padded(outcomes);
    std::vector<std::size_t> perm(outcomes);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<Povm> local;
    do {
      std::vector<HermitianMatrix> e;
      for (std::size_t k = 0; k < outcomes; ++k) e.push_back(p.element(perm[k]));
      std::ostringstream label;
      label << base.label() << "[";
      for (std::size_t k = 0; k < outcomes; ++k) label << perm[k];
      label << "]";
      Povm cand(std::move(e), label.str());
      if (std::none_of(local.begin(), local.end(), [&](const Povm& q) { return same(q, cand); }))
        local.push_back(std::move(cand));
    } while (std::next_permutation(perm.begin(), perm.end()));
    family.insert(family.end(), local.begin(), local.end());
  };
  for (const auto& m : active.povms()) add_relabelings(m);
  add_relabelings(Povm({HermitianMatrix::identity(2)}, "trivial"));
  return MeasurementSet(std::move(family), active.id() + "-relabeled");
}

// ---------------------------------------------------------------------------
// Deterministic strategies

std::size_t strategy_count(const MeasurementSet& ms) {
  std::size_t n = 1;
  for (const auto& m : ms.povms()) {
    n *= m.nonzero_outcomes().size();
    if (n > kMaxStrategies) return kMaxStrategies + 1;
  }
  return ms.size() == 0 ? 0 : n;
}

std::vector<DeterministicStrategy> enumerate_strategies(const MeasurementSet& ms) {
  if (ms.size() == 0) throw DomainError("enumerate_strategies: empty measurement set");
  const std::size_t n = strategy_count(ms);
  if (n > kMaxStrategies) {
    std::ostringstream os;
    os << "enumerate_strategies: more than " << kMaxStrategies << " deterministic strategies";
    throw DomainError(os.str());
  }
  std::vector<std::vector<std::size_t>> choices;
  for (const auto& m : ms.povms()) choices.push_back(m.nonzero_outcomes());

  std::vector<DeterministicStrategy> out(n);
  for (std::size_t lambda = 0; lambda < n; ++lambda) {
    out[lambda].index = lambda;
    out[lambda].outcome.resize(ms.size());
    std::size_t rest = lambda;
    for (std::size_t x = 0; x < ms.size(); ++x) {
      out[lambda].outcome[x] = choices[x][rest % choices[x].size()];
      rest /= choices[x].size();
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Shrinking

HermitianMatrix xi_state(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("xi_state: p outside [0, 1]");
  RealVector d(2);
  d << p + (1.0 - p) / 2.0, (1.0 - p) / 2.0;
  return HermitianMatrix::diagonal(d);
}

ShrinkConfig::ShrinkConfig(double p, double eta) : p_(p), eta_(eta) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("ShrinkConfig: p outside [0, 1]");
  if (!(eta >= 0.0 && eta <= 1.0)) throw DomainError("ShrinkConfig: eta outside [0, 1]");
}

Povm shrink_povm(const Povm& m, const ShrinkConfig& cfg) {
  const ComplexMatrix xi = cfg.xi_a().matrix();
  std::vector<HermitianMatrix> e;
  for (const auto& el : m.elements()) {
    const double t = (xi * el.matrix()).trace().real();
    e.emplace_back(cfg.eta() * el.matrix() + (1.0 - cfg.eta()) * t * identity2());
  }
  return Povm(std::move(e), m.label());
}

namespace {

// Real coordinates of a 2x2 Hermitian matrix: (re00, re11, re01, im01).
std::array<double, 4> hermitian_coords(const ComplexMatrix& m) {
  return {m(0, 0).real(), m(1, 1).real(), m(0, 1).real(), m(0, 1).imag()};
}

}  // namespace

MembershipResult membership_lp(const Povm& target_in, const MeasurementSet& family) {
  if (family.size() == 0) throw DomainError("membership_lp: empty family");
  const std::size_t k = family.max_outcomes();
  for (const auto& m : family.povms())
    if (m.outcomes() != k) throw DomainError("membership_lp: family outcome counts differ");
  if (target_in.outcomes() > k) throw DomainError("membership_lp: target has too many outcomes");
  const Povm target = target_in.padded(k);

  const Eigen::Index rows = static_cast<Eigen::Index>(4 * k + 1);
  const Eigen::Index cols = static_cast<Eigen::Index>(family.size());
  Eigen::MatrixXd a(rows, cols);
  Eigen::VectorXd b(rows);
  for (std::size_t x = 0; x < family.size(); ++x) {
    for (std::size_t o = 0; o < k; ++o) {
      const auto c = hermitian_coords(family[x].element(o).matrix());
      for (int r = 0; r < 4; ++r) a(static_cast<Eigen::Index>(4 * o + r), x) = c[r];
    }
    a(rows - 1, x) = 1.0;
  }
  for (std::size_t o = 0; o < k; ++o) {
    const auto c = hermitian_coords(target.element(o).matrix());
    for (int r = 0; r < 4; ++r) b(static_cast<Eigen::Index>(4 * o + r)) = c[r];
  }
  b(rows - 1) = 1.0;

  const LpResult lp = find_nonnegative_solution(a, b);
  if (lp.status == LpStatus::IterationLimit) throw SolverError("membership_lp: simplex stalled");

  MembershipResult res;
  if (lp.status != LpStatus::Feasible) return res;

  // Independent substitution check.
  double worst = std::abs(lp.x.sum() - 1.0);
  for (std::size_t o = 0; o < k; ++o) {
    ComplexMatrix sum = ComplexMatrix::Zero(2, 2);
    for (std::size_t x = 0; x < family.size(); ++x) sum += lp.x(x) * family[x].element(o).matrix();
    worst = std::max(worst, max_abs_distance(sum, target.element(o).matrix()));
  }
  res.residual = worst;
  if (worst > 1e-9 || lp.x.minCoeff() < 0.0) return res;
  res.feasible = true;
  res.weights.assign(lp.x.data(), lp.x.data() + lp.x.size());
  return res;
}

double max_feasible_eta(const Povm& target, const MeasurementSet& family, double p, double tol) {
  auto feasible = [&](double eta) {
    return membership_lp(shrink_povm(target, ShrinkConfig(p, eta)), family).feasible;
  };
  if (feasible(1.0)) return 1.0;
  double lo = 0.0, hi = 1.0;
  if (!feasible(lo)) return 0.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  return lo;
}

std::optional<Povm> rank_one_povm(const std::vector<Eigen::Vector3d>& directions,
                                  std::string label) {
  const auto n = static_cast<Eigen::Index>(directions.size());
  Eigen::MatrixXd a(4, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a.col(i).head<3>() = directions[i].normalized();
    a(3, i) = 1.0;
  }
  Eigen::Vector4d rhs(0.0, 0.0, 0.0, 2.0);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < std::min<Eigen::Index>(4, n)) return std::nullopt;
  const Eigen::VectorXd w = qr.solve(rhs);
  if ((a * w - rhs).norm() > 1e-10 || w.minCoeff() < 0.0) return std::nullopt;
  std::vector<HermitianMatrix> e;
  for (Eigen::Index i = 0; i < n; ++i)
    e.emplace_back(bloch_operator(w(i), directions[i].normalized()));
  try {
    return Povm(std::move(e), std::move(label));
  } catch (const NumericalError&) {
    return std::nullopt;
  }
}

std::vector<Eigen::Vector3d> fibonacci_sphere(std::size_t count) {
  std::vector<Eigen::Vector3d> out;
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(count);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * static_cast<double>(i);
    out.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
  }
  return out;
}

namespace {

struct Candidate {
  std::vector<Eigen::Vector3d> directions;  // empty for explicit POVMs
  Povm povm;
  double eta;
};

Eigen::Vector3d bloch_direction(const HermitianMatrix& e) {
  const ComplexMatrix& m = e.matrix();
  const double w = m.trace().real();
  return Eigen::Vector3d(2.0 * m(0, 1).real(), -2.0 * m(0, 1).imag(),
                         (m(0, 0) - m(1, 1)).real()) / w;
}

// Pattern search over the Bloch directions of a rank-1 POVM.
Candidate refine(Candidate c, const MeasurementSet& family, double p, double final_step,
                 const ShrinkNetOptions& opts, std::mt19937_64& rng, std::size_t& tested) {
  std::normal_distribution<double> gauss;
  double step = opts.initial_step;
  while (step >= final_step) {
    bool improved = false;
    for (std::size_t i = 0; i < c.directions.size(); ++i) {
      for (int trial = 0; trial < 6; ++trial) {
        auto dirs = c.directions;
        Eigen::Vector3d kick(gauss(rng), gauss(rng), gauss(rng));
        dirs[i] = (dirs[i] + step * kick).normalized();
        auto povm = rank_one_povm(dirs);
        if (!povm) continue;
        ++tested;
        const double eta = max_feasible_eta(*povm, family, p, opts.bisection_tol);
        if (eta < c.eta) {
          c = Candidate{std::move(dirs), std::move(*povm), eta};
          improved = true;
        }
      }
    }
    if (!improved) step /= 2.0;
  }
  return c;
}

}  // namespace

ShrinkEstimate shrinking_factor_estimate(const MeasurementSet& family, double p,
                                         double net_resolution, const ShrinkNetOptions& opts) {
  if (!(net_resolution > 0.0)) throw DomainError("shrinking_factor_estimate: resolution must be > 0");
  ShrinkEstimate est;
  est.p = p;
  est.net_resolution = net_resolution;

  std::vector<Candidate> pool;
  const auto net = fibonacci_sphere(std::max<std::size_t>(opts.projective_points, 1));
  for (std::size_t i = 0; i < opts.projective_points; ++i) {
    Povm m = Povm::projective(net[i], "proj");
    const double eta = max_feasible_eta(m, family, p, opts.bisection_tol);
    pool.push_back({{net[i], -net[i]}, std::move(m), eta});
  }
  est.povms_tested += opts.projective_points;

  std::mt19937_64 rng(0x5eedULL);
  std::uniform_int_distribution<std::size_t> pick(0, net.size() - 1);
  std::size_t seeds = 0, attempts = 0;
  while (seeds < opts.four_outcome_seeds && attempts < 200 * (opts.four_outcome_seeds + 1)) {
    ++attempts;
    std::vector<Eigen::Vector3d> dirs{net[pick(rng)], net[pick(rng)], net[pick(rng)], net[pick(rng)]};
    auto povm = rank_one_povm(dirs);
    if (!povm) continue;
    ++seeds;
    const double eta = max_feasible_eta(*povm, family, p, opts.bisection_tol);
    pool.push_back({std::move(dirs), std::move(*povm), eta});
  }
  est.povms_tested += seeds;

  for (const auto& m : opts.extra_candidates) {
    const double eta = max_feasible_eta(m, family, p, opts.bisection_tol);
    std::vector<Eigen::Vector3d> dirs;
    for (const auto& e : m.elements())
      if (e.trace() > 1e-12) dirs.push_back(bloch_direction(e));
    pool.push_back({std::move(dirs), m, eta});
    ++est.povms_tested;
  }

  std::stable_sort(pool.begin(), pool.end(),
                   [](const Candidate& a, const Candidate& b) { return a.eta < b.eta; });
  const std::size_t n_refine = std::min(opts.refined_seeds, pool.size());
  std::vector<Candidate> refined;
  for (std::size_t i = 0; i < n_refine; ++i)
    refined.push_back(refine(pool[i], family, p, net_resolution, opts, rng, est.povms_tested));

  double upper = pool.empty() ? 1.0 : pool.front().eta;
  for (const auto& c : refined) upper = std::min(upper, c.eta);
  est.eta_upper_bound = upper;
  est.eta_lower_estimate = std::max(0.0, upper - opts.slack_constant * net_resolution);
  std::stable_sort(refined.begin(), refined.end(),
                   [](const Candidate& a, const Candidate& b) { return a.eta < b.eta; });
  for (const auto& c : refined) est.worst.push_back(c.povm);
  return est;
}

std::vector<ShrinkEstimate> shrinking_factor_table(const MeasurementSet& family,
                                                   const std::vector<double>& ps,
                                                   double net_resolution,
                                                   const ShrinkNetOptions& opts) {
  std::vector<ShrinkEstimate> rows;
  std::vector<Povm> pooled = opts.extra_candidates;
  for (double p : ps) {
    rows.push_back(shrinking_factor_estimate(family, p, net_resolution, opts));
    pooled.insert(pooled.end(), rows.back().worst.begin(), rows.back().worst.end());
  }
  for (auto& row : rows) {
    for (const auto& m : pooled) {
      const double eta = max_feasible_eta(m, family, row.p, opts.bisection_tol);
      ++row.povms_tested;
      if (eta < row.eta_upper_bound) {
        row.eta_upper_bound = eta;
        row.eta_lower_estimate = std::max(0.0, eta - opts.slack_constant * net_resolution);
      }
    }
  }
  return rows;
}

const std::array<std::pair<double, double>, 10>& published_shrinking_table() {
  static const std::array<std::pair<double, double>, 10> table{{{0.0, 0.67},
                                                                {0.1, 0.67},
                                                                {0.2, 0.66},
                                                                {0.3, 0.66},
                                                                {0.4, 0.66},
                                                                {0.5, 0.66},
                                                                {0.6, 0.62},
                                                                {0.7, 0.56},
                                                                {0.8, 0.47},
                                                                {0.9, 0.32}}};
  return table;
}

std::optional<double> published_shrinking_factor(double p) {
  for (const auto& [pp, eta] : published_shrinking_table())
    if (std::abs(pp - p) < 1e-9) return eta;
  return std::nullopt;
}

}  // namespace hlc
