#pragma once

#include <cstddef>
#include <vector>

#include "mixtest/distribution.hpp"

namespace mixtest {

inline constexpr double kDefaultLearnerConstant = 64.0;

struct LearnerState {
  std::vector<std::size_t> S;  ///< elements with q1(i) > q2(i)
  double w_S = 0.0;            ///< empirical mass of S
  double eps_prime = 0.0;
  double q1_S = 0.0;
  double q2_S = 0.0;
};

/// Fixed draw size the learner expects: ⌈c_learn / eps²⌉.
std::int64_t learner_budget(double eps, double c_learn = kDefaultLearnerConstant);

/// S, w_S and the component masses on S. Throws DomainMismatch, EmptyCounts.
LearnerState learner_state(const Distribution& q1, const Distribution& q2, double eps,
                           const CountVector& p_samples);

/// α estimate biased downward by eps/4 in the S-mass, clamped to [0,1].
/// Returns 0 outright when ‖q1 − q2‖₁ ≤ eps.
/// Throws DomainMismatch, InvalidEpsilon, EmptyCounts.
MixtureCandidate mixture_learner(const Distribution& q1, const Distribution& q2, double eps,
                                 const CountVector& p_samples);

}  // namespace mixtest
