#include "mixtest/learner.hpp"

#include <algorithm>
#include <cmath>

#include "mixtest/errors.hpp"

namespace mixtest {

std::int64_t learner_budget(double eps, double c_learn) {
  if (!(eps > 0.0 && eps < 2.0)) fail(ErrorKind::InvalidEpsilon, "learner eps");
  return static_cast<std::int64_t>(std::ceil(c_learn / (eps * eps)));
}

LearnerState learner_state(const Distribution& q1, const Distribution& q2, double eps,
                           const CountVector& p_samples) {
  if (q1.size() != q2.size() || q1.size() != p_samples.size()) {
    fail(ErrorKind::DomainMismatch, "learner inputs");
  }
  if (p_samples.total() <= 0) fail(ErrorKind::EmptyCounts, "learner needs samples");
  LearnerState st;
  st.eps_prime = eps;
  std::int64_t hits = 0;
  long double m1 = 0.0L, m2 = 0.0L;
  for (std::size_t i = 0; i < q1.size(); ++i) {
    if (q1[i] > q2[i]) {
      st.S.push_back(i);
      hits += p_samples[i];
      m1 += q1[i];
      m2 += q2[i];
    }
  }
  st.w_S = static_cast<double>(hits) / static_cast<double>(p_samples.total());
  st.q1_S = static_cast<double>(m1);
  st.q2_S = static_cast<double>(m2);
  return st;
}

MixtureCandidate mixture_learner(const Distribution& q1, const Distribution& q2, double eps,
                                 const CountVector& p_samples) {
  if (!(eps > 0.0 && eps < 2.0)) fail(ErrorKind::InvalidEpsilon, "learner eps");
  if (q1.size() != q2.size() || q1.size() != p_samples.size()) {
    fail(ErrorKind::DomainMismatch, "learner inputs");
  }
  if (lp_distance(q1, q2, LpOrder::L1) <= eps) return MixtureCandidate(0.0);
  const LearnerState st = learner_state(q1, q2, eps, p_samples);
  const double tv = st.q1_S - st.q2_S;
  const double alpha = (st.q1_S - (st.w_S + eps / 4.0)) / tv;
  return MixtureCandidate(std::clamp(alpha, 0.0, 1.0));
}

}  // namespace mixtest
