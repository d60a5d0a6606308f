#include <doctest.h>

#include <cmath>

#include "mixtest/errors.hpp"
#include "mixtest/instances.hpp"
#include "mixtest/learner.hpp"

using namespace mixtest;

TEST_CASE("learner on exact counts") {
  const Distribution q1({1, 0}), q2({0, 1});
  const CountVector exact({3, 7}, 10.0);
  constexpr double eps = 0.1;
  CHECK(mixture_learner(q1, q2, eps, exact).alpha() == doctest::Approx(0.7 - eps / 4));
}

TEST_CASE("identical components return zero") {
  Rng rng(1);
  const auto q = random_distribution(10, rng);
  CHECK(mixture_learner(q, q, 0.1, sample(q, 100, rng)).alpha() == 0.0);
}

TEST_CASE("samples from q1 give alpha near zero") {
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    const auto q1 = random_distribution(50, rng), q2 = random_distribution(50, rng);
    constexpr double eps = 0.1;
    const double a = mixture_learner(q1, q2, eps, sample(q1, learner_budget(eps), rng)).alpha();
    CHECK(a <= eps / lp_distance(q1, q2, LpOrder::L1));
  }
}

TEST_CASE("learner state and the total variation identity") {
  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    const auto q1 = random_distribution(2 + rng.below(60), rng), q2 = random_distribution(q1.size(), rng);
    const auto st = learner_state(q1, q2, 0.1, sample(q1, 50, rng));
    for (std::size_t i : st.S) CHECK(q1[i] > q2[i]);
    std::size_t strict = 0;
    for (std::size_t i = 0; i < q1.size(); ++i) strict += q1[i] > q2[i];
    CHECK(st.S.size() == strict);
    CHECK((st.w_S >= 0.0 && st.w_S <= 1.0));
    CHECK(2.0 * (st.q1_S - st.q2_S) == doctest::Approx(lp_distance(q1, q2, LpOrder::L1)).epsilon(1e-12));
  }
}

TEST_CASE("learner output is clamped and deterministic") {
  const Distribution q1({0.9, 0.1}), q2({0.1, 0.9});
  // All mass on the q1 side pushes the raw estimate below 0.
  CHECK(mixture_learner(q1, q2, 0.1, CountVector({10, 0}, 10)).alpha() == 0.0);
  CHECK(mixture_learner(q1, q2, 0.1, CountVector({0, 10}, 10)).alpha() == 1.0);
  const CountVector c({4, 6}, 10);
  CHECK(mixture_learner(q1, q2, 0.1, c) == mixture_learner(q1, q2, 0.1, c));
}

TEST_CASE("learner errors") {
  const Distribution q1({1, 0}), q2({0, 1});
  CHECK_THROWS_AS(mixture_learner(q1, q2, 0.0, CountVector({1, 1}, 2)), Error);
  CHECK_THROWS_AS(mixture_learner(q1, q2, 2.5, CountVector({1, 1}, 2)), Error);
  CHECK_THROWS_AS(mixture_learner(q1, q2, 0.1, CountVector({1, 1, 1}, 3)), Error);
  CHECK(learner_budget(0.1) == 6400);
}
