#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mixtest/distribution.hpp"
#include "mixtest/kflat.hpp"

namespace mixtest {

//==============================================================================
// Random distributions
//==============================================================================

/// Flat Dirichlet draw (normalized exponential weights).
Distribution random_distribution(std::size_t n, Rng& rng);

/// q(i) ∝ (i+1)^(−s).
Distribution zipf_distribution(std::size_t n, double s);

/// The first ⌈hi_fraction · n⌉ elements share hi_mass, the rest share the remainder.
Distribution two_step_distribution(std::size_t n, double hi_fraction, double hi_mass);

/// k random intervals with random levels.
Distribution random_kflat(std::size_t n, std::size_t k, Rng& rng);

/// q(x) ∝ levels[x mod levels.size()]; few distinct values, none contiguous.
Distribution periodic_distribution(std::size_t n, const std::vector<double>& levels);

//==============================================================================
// Hard and far instances
//==============================================================================

struct LbInstance {
  Distribution p_star;
  Distribution q_star;
  std::vector<std::size_t> A_set, B_set, C_set;
  double a_level;   ///< level on B (p*) and C (q*) after rescaling, ≈ 4ε/n
  double b_level;   ///< level on A after rescaling, ≈ ε^{4/3}/n^{2/3}
  bool in_regime;   ///< ε ≥ 4^{3/4}/n^{1/4}, where the construction is tight
  double distance;  ///< oracle distance of p* from mixtures of q* and uniform
};

/// Throws InvalidEpsilon, InfeasibleParameters (sets do not fit in [n], or
/// the oracle does not certify distance ≥ ε).
LbInstance gen_lb_instance(std::size_t n, double eps);

/// p with distance_to_mixture_family(p, q1, q2) ∈ [eps, 1.5 eps], obtained
/// by perturbing a random mixture along a direction orthogonal to both the
/// all-ones vector and q1 − q2. Throws InvalidEpsilon, Infeasible.
Distribution gen_far_instance(const Distribution& q1, const Distribution& q2, double eps, Rng& rng);

//==============================================================================
// k-flat family oracle
//==============================================================================

struct KFlatDistance {
  double grid_min;     ///< min over segmentations and the α grid
  double lower_bound;  ///< grid_min − step; ‖·‖₁ is 2-Lipschitz in α
  double alpha;
};

/// Distance from p to {(1−α) q + α r : r a k-flat distribution} by exhaustive
/// segmentation enumeration; each (segmentation, α) is solved exactly.
/// Feasible only for small n and k.
KFlatDistance kflat_family_distance(const Distribution& p, const Distribution& q, std::size_t k,
                                    double alpha_step = 1e-3);

/// p = q ∘ (1 + t z) with balanced random signs z inside each bucket of q,
/// for the smallest t on a 0.02 grid whose certified distance is ≥ eps.
/// Throws Infeasible.
Distribution gen_kflat_far_instance(const Distribution& q, std::size_t k, double eps, Rng& rng);

}  // namespace mixtest
