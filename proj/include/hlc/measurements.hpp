#pragma once

// Finite qubit measurement sets, deterministic strategies over them, the
// noise-shrinking map on POVMs, and membership / shrinking-factor machinery.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hlc/linalg.hpp"

namespace hlc {

/// Qubit POVM. Zero elements are allowed (relabelled families carry them).
class Povm {
 public:
  /// Throws NumericalError unless every element is 2x2 PSD within 1e-10
  /// and the elements sum to the identity within 1e-10.
  Povm(std::vector<HermitianMatrix> elements, std::string label);

  /// {P_n, P_-n} for a unit Bloch vector n.
  static Povm projective(const Eigen::Vector3d& n, std::string label);

  std::size_t outcomes() const { return elements_.size(); }
  const HermitianMatrix& element(std::size_t a) const { return elements_.at(a); }
  const std::vector<HermitianMatrix>& elements() const { return elements_; }
  const std::string& label() const { return label_; }

  /// Same POVM with zero elements appended up to `k` outcomes.
  Povm padded(std::size_t k) const;

  /// Outcomes whose element has trace above `tol`.
  std::vector<std::size_t> nonzero_outcomes(double tol = 1e-12) const;

 private:
  std::vector<HermitianMatrix> elements_;
  std::string label_;
};

class MeasurementSet {
 public:
  MeasurementSet(std::vector<Povm> povms, std::string id);

  std::size_t size() const { return povms_.size(); }
  const Povm& operator[](std::size_t x) const { return povms_.at(x); }
  const std::vector<Povm>& povms() const { return povms_; }
  const std::string& id() const { return id_; }

  /// Largest outcome count over the set.
  std::size_t max_outcomes() const;

 private:
  std::vector<Povm> povms_;
  std::string id_;
};

/// The 12 unit vertices (0, +-1, +-phi), (+-1, +-phi, 0), (+-phi, 0, +-1) / |.|.
std::vector<Eigen::Vector3d> icosahedron_vertices();

/// One representative per antipodal vertex pair (z > 0, ties broken by y > 0).
std::vector<Eigen::Vector3d> icosahedron_upper_vertices();

/// The six two-outcome projective measurements along the upper vertices.
MeasurementSet icosahedron_set();

/// Every distinct relabelling of each member padded to `outcomes` outcomes,
/// plus the `outcomes` relabellings of the trivial measurement {1, 0, ...}.
/// For the icosahedron set and four outcomes this has 76 members.
MeasurementSet relabeled_family(const MeasurementSet& active, std::size_t outcomes = 4);

/// Assignment of one nonzero outcome to every measurement of a set.
struct DeterministicStrategy {
  std::size_t index = 0;
  std::vector<std::size_t> outcome;  ///< outcome label chosen for each measurement

  /// D(a|x): 1 when the strategy answers `a` to measurement `x`.
  double response(std::size_t x, std::size_t a) const { return outcome.at(x) == a ? 1.0 : 0.0; }
};

inline constexpr std::size_t kMaxStrategies = 1'000'000;

/// Product of the nonzero-outcome counts; saturates at kMaxStrategies + 1.
std::size_t strategy_count(const MeasurementSet& ms);

/// Exhaustive mixed-radix enumeration over nonzero outcomes (zero elements
/// force the matching hidden state to vanish, so they are pruned). Throws
/// DomainError when the count exceeds kMaxStrategies.
std::vector<DeterministicStrategy> enumerate_strategies(const MeasurementSet& ms);

/// xi_A = p|0><0| + (1 - p) 1/2.
HermitianMatrix xi_state(double p);

class ShrinkConfig {
 public:
  /// p in [0, 1], eta in [0, 1].
  ShrinkConfig(double p, double eta);
  double p() const { return p_; }
  double eta() const { return eta_; }
  HermitianMatrix xi_a() const { return xi_state(p_); }

 private:
  double p_;
  double eta_;
};

/// M_a -> eta M_a + (1 - eta) Tr[xi_A M_a] 1.
Povm shrink_povm(const Povm& m, const ShrinkConfig& cfg);

struct MembershipResult {
  bool feasible = false;
  std::vector<double> weights;  ///< convex weights over the family, when feasible
  double residual = 0.0;        ///< max entrywise reconstruction error
};

/// Decides whether `target` is a convex combination of the family members.
/// A feasible answer is re-checked by substitution (<= 1e-9) before return.
/// Throws SolverError when the LP stalls.
MembershipResult membership_lp(const Povm& target, const MeasurementSet& family);

/// Largest eta (bisection to `tol`) for which shrink_povm(target) is in the
/// convex hull of the family; the returned value is itself certified feasible.
double max_feasible_eta(const Povm& target, const MeasurementSet& family, double p,
                        double tol = 1e-4);

/// Rank-1 POVM {(w_a/2)(1 + n_a.sigma)} completing the given directions;
/// empty when the origin is not in their convex hull.
std::optional<Povm> rank_one_povm(const std::vector<Eigen::Vector3d>& directions,
                                  std::string label = "rank1");

/// Points of a Fibonacci lattice on the unit sphere.
std::vector<Eigen::Vector3d> fibonacci_sphere(std::size_t count);

struct ShrinkNetOptions {
  double slack_constant = 2.0;       ///< lower estimate = upper bound - c * resolution
  std::size_t projective_points = 200;
  std::size_t four_outcome_seeds = 400;
  std::size_t refined_seeds = 4;
  double initial_step = 0.2;
  double bisection_tol = 1e-4;
  std::vector<Povm> extra_candidates;  ///< evaluated in addition to the generated net
};

struct ShrinkEstimate {
  double p = 0.0;
  double net_resolution = 0.0;
  double eta_upper_bound = 1.0;
  double eta_lower_estimate = 1.0;
  std::size_t povms_tested = 0;
  std::vector<Povm> worst;  ///< net points attaining the upper bound (refined minima)
};

/// Minimum of max_feasible_eta over a net of extremal qubit POVMs: projective
/// measurements on a Fibonacci net, rank-1 four-outcome POVMs from seeded
/// quadruples of net directions, and pattern-search refinement of the worst
/// seeds down to `net_resolution`. The lower estimate subtracts a continuity
/// slack; it is an estimate, not a certified bound.
ShrinkEstimate shrinking_factor_estimate(const MeasurementSet& family, double p,
                                         double net_resolution,
                                         const ShrinkNetOptions& opts = {});

/// Runs the estimate for every p and then re-evaluates every p against the
/// pooled refined minima, so all rows share one net.
std::vector<ShrinkEstimate> shrinking_factor_table(const MeasurementSet& family,
                                                   const std::vector<double>& ps,
                                                   double net_resolution,
                                                   const ShrinkNetOptions& opts = {});

/// Published lower bounds for the icosahedron family, keyed by p.
const std::array<std::pair<double, double>, 10>& published_shrinking_table();

/// Table value for p (matched within 1e-9), if listed.
std::optional<double> published_shrinking_factor(double p);

}  // namespace hlc
