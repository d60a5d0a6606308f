#include "mixtest/identity.hpp"

#include <cmath>
#include <vector>

#include "mixtest/errors.hpp"
#include "mixtest/reshape.hpp"

namespace mixtest {

void validate(const IdentityConfig& cfg) {
  if (!(cfg.eps > 0.0 && cfg.eps < 2.0)) fail(ErrorKind::InvalidEpsilon, "identity eps");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) fail(ErrorKind::InvalidArgument, "delta outside (0,1)");
  if (cfg.repeats < 1 || cfg.repeats % 2 == 0) fail(ErrorKind::InvalidArgument, "repeats must be odd");
  if (!(cfg.c_sub > 0.0) || !(cfg.c_learn > 0.0)) fail(ErrorKind::InvalidArgument, "constants must be > 0");
}

double subtest_budget(std::size_t m, double eps, double c_sub) {
  return c_sub * std::sqrt(static_cast<double>(m)) / (eps * eps);
}

Verdict l2_l1_identity_subtest(const Distribution& q_ref, double eps, const CountVector& p_counts,
                               double c_sub) {
  if (q_ref.size() != p_counts.size()) fail(ErrorKind::DomainMismatch, "identity subtest");
  if (!(eps > 0.0 && eps < 2.0)) fail(ErrorKind::InvalidEpsilon, "identity subtest eps");
  const std::size_t m = q_ref.size();
  const double s = p_counts.nominal_s();
  const double need = subtest_budget(m, eps, c_sub);
  if (s < need * (1.0 - 1e-12)) fail(ErrorKind::InsufficientSamples, "identity subtest budget");
  long double z = 0.0L;
  for (std::size_t i = 0; i < m; ++i) {
    const long double x = static_cast<long double>(p_counts[i]);
    const long double centered = x - static_cast<long double>(s) * q_ref[i];
    z += centered * centered - x;
  }
  Verdict v;
  v.statistic = static_cast<double>(z);
  v.threshold = s * s * eps * eps / (2.0 * static_cast<double>(m));
  v.accepted = v.statistic <= v.threshold;
  v.details["m"] = static_cast<double>(m);
  v.details["s"] = s;
  return v;
}

Verdict identity_test_known_noise(const Distribution& q1, const Distribution& q2,
                                  const IdentityConfig& cfg, SampleSource& p_source, Rng& rng) {
  validate(cfg);
  if (q1.size() != q2.size() || q1.size() != p_source.domain_size()) {
    fail(ErrorKind::DomainMismatch, "identity tester inputs");
  }
  const double eps_prime = cfg.eps / 6.0;
  std::vector<Verdict> runs;
  runs.reserve(static_cast<std::size_t>(cfg.repeats));
  for (int r = 0; r < cfg.repeats; ++r) {
    const std::int64_t before = p_source.samples_drawn();
    const CountVector learn = p_source.draw_counts(learner_budget(eps_prime, cfg.c_learn), rng);
    const MixtureCandidate alpha = mixture_learner(q1, q2, eps_prime, learn);
    const Distribution q_alpha = mix(q1, q2, alpha);
    const ReshapePlan plan = build_reshape_plan(q_alpha, q2);
    const Distribution q_ref = reshape_distribution(q_alpha, plan);
    ReshapedSource reshaped(p_source, plan);
    const double s = subtest_budget(plan.total_size(), cfg.eps, cfg.c_sub);
    Verdict v = l2_l1_identity_subtest(q_ref, cfg.eps, reshaped.draw_poisson(s, rng), cfg.c_sub);
    v.samples_used = p_source.samples_drawn() - before;
    v.candidates = {alpha.alpha()};
    v.details["alpha"] = alpha.alpha();
    v.details["learner_samples"] = static_cast<double>(learn.total());
    runs.push_back(std::move(v));
  }
  return majority(runs);
}

}  // namespace mixtest
