#pragma once

#include "mixtest/distribution.hpp"
#include "mixtest/learner.hpp"
#include "mixtest/sources.hpp"
#include "mixtest/verdict.hpp"

namespace mixtest {

struct IdentityConfig {
  double eps = 0.1;
  double c_sub = 16.0;
  double delta = 1.0 / 3.0;
  int repeats = 1;
  double c_learn = kDefaultLearnerConstant;
};

/// Throws InvalidEpsilon or InvalidArgument.
void validate(const IdentityConfig& cfg);

/// Poisson budget c_sub · √m / eps².
double subtest_budget(std::size_t m, double eps, double c_sub);

/// Z = Σ((X_i − s q_ref(i))² − X_i), accept iff Z ≤ s² eps² / (2m).
/// Throws DomainMismatch, InvalidEpsilon, InsufficientSamples.
Verdict l2_l1_identity_subtest(const Distribution& q_ref, double eps, const CountVector& p_counts,
                               double c_sub = 16.0);

/// Learner at eps/6 on one batch, reshape onto (q_α, q2), then the subtest on
/// a fresh Poissonized batch pushed through the reshape.
/// Throws DomainMismatch, InvalidEpsilon.
Verdict identity_test_known_noise(const Distribution& q1, const Distribution& q2,
                                  const IdentityConfig& cfg, SampleSource& p_source, Rng& rng);

}  // namespace mixtest
