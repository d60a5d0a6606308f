#include <doctest.h>

#include <cmath>
#include <vector>

#include "mixtest/distribution.hpp"
#include "mixtest/errors.hpp"
#include "mixtest/instances.hpp"
#include "oracles.hpp"

using namespace mixtest;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::BadInput;
}

std::vector<double> vec(const Distribution& d) { return {d.pmf().begin(), d.pmf().end()}; }

}  // namespace

TEST_CASE("make_distribution normalizes weights") {
  const std::vector<double> a{2, 2}, b{1, 0, 0, 0}, c{1, 2, 3, 4};
  CHECK(vec(make_distribution(a)) == std::vector<double>{0.5, 0.5});
  CHECK(vec(make_distribution(b)) == std::vector<double>{1, 0, 0, 0});
  const auto d = make_distribution(c);
  for (std::size_t i = 0; i < 4; ++i) CHECK(d[i] == doctest::Approx(0.1 * (i + 1)).epsilon(1e-15));
}

TEST_CASE("distribution validation errors") {
  CHECK(kind_of([] { make_distribution(std::vector<double>{}); }) == ErrorKind::EmptyDomain);
  CHECK(kind_of([] { make_distribution(std::vector<double>{1, -1}); }) == ErrorKind::NegativeWeight);
  CHECK(kind_of([] { make_distribution(std::vector<double>{0, 0}); }) == ErrorKind::ZeroMass);
  CHECK(kind_of([] { Distribution(std::vector<double>{0.5, 0.4}); }) == ErrorKind::NotNormalized);
  CHECK(kind_of([] { MixtureCandidate(1.5); }) == ErrorKind::InvalidAlpha);
  CHECK(kind_of([] { MixtureCandidate(-0.1); }) == ErrorKind::InvalidAlpha);
  CHECK_NOTHROW(Distribution(std::vector<double>{0.5, 0.5 + 1e-13}));
}

TEST_CASE("mix endpoints and a direct evaluation") {
  Rng rng(1);
  const auto q1 = random_distribution(7, rng), q2 = random_distribution(7, rng);
  CHECK(vec(mix(q1, q2, MixtureCandidate(0))) == vec(q1));
  CHECK(vec(mix(q1, q2, MixtureCandidate(1))) == vec(q2));
  const auto m = mix(Distribution({1, 0}), Distribution({0, 1}), MixtureCandidate(0.3));
  CHECK(m[0] == doctest::Approx(0.7));
  CHECK(m[1] == doctest::Approx(0.3));
}

TEST_CASE("every mixture is a valid distribution") {
  Rng rng(2);
  for (int t = 0; t < 200; ++t) {
    const auto q1 = random_distribution(1 + rng.below(40), rng);
    const auto q2 = random_distribution(q1.size(), rng);
    const auto m = mix(q1, q2, MixtureCandidate(rng.uniform()));
    double s = 0;
    for (double x : m.pmf()) {
      CHECK(x >= 0.0);
      s += x;
    }
    CHECK(std::fabs(s - 1.0) <= kNormalizationTolerance);
  }
}

TEST_CASE("sample") {
  Rng rng(3);
  const auto c = sample(Distribution({0, 1, 0}), 10, rng);
  CHECK(c[1] == 10);
  CHECK(c.total() == 10);
  CHECK(sample(Distribution::uniform(5), 0, rng).total() == 0);
  const auto u = sample(Distribution::uniform(4), 1000000, rng);
  const double sd = std::sqrt(1e6 * 0.25 * 0.75);
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::fabs(u[i] - 250000.0) <= 4 * sd);
}

TEST_CASE("sampling is deterministic per seed") {
  const auto d = make_distribution(std::vector<double>{1, 2, 3, 4, 5});
  Rng c(7), e(7);
  const auto x = sample(d, 5000, c), y = sample(d, 5000, e);
  CHECK(std::equal(x.counts().begin(), x.counts().end(), y.counts().begin()));
  const auto px = poisson_sample(d, 300.0, c), py = poisson_sample(d, 300.0, e);
  CHECK(std::equal(px.counts().begin(), px.counts().end(), py.counts().begin()));
}

TEST_CASE("poisson_sample moments") {
  Rng rng(4);
  const Distribution d({0.0, 0.1, 0.3, 0.6});
  constexpr double s = 40.0;
  constexpr int reps = 10000;
  std::vector<std::vector<double>> xs(4);
  for (int r = 0; r < reps; ++r) {
    const auto c = poisson_sample(d, s, rng);
    CHECK(c.nominal_s() == s);
    for (std::size_t i = 0; i < 4; ++i) xs[i].push_back(static_cast<double>(c[i]));
  }
  for (double x : xs[0]) CHECK(x == 0.0);
  for (std::size_t i = 1; i < 4; ++i) {
    const double lambda = s * d[i];
    const auto m = oracle::moments(xs[i]);
    CHECK(std::fabs(m.mean - lambda) <= 5 * m.se);
    // Var of the sample variance for Poisson: (λ + 2λ²(n/(n−1)))/n ≈ (λ + 2λ²)/n.
    std::vector<double> sq;
    for (double x : xs[i]) sq.push_back((x - lambda) * (x - lambda));
    const auto v = oracle::moments(sq);
    CHECK(std::fabs(v.mean - lambda) <= 5 * v.se);
  }
}

TEST_CASE("lp distances") {
  Rng rng(5);
  const auto d = random_distribution(9, rng);
  for (auto o : {LpOrder::L1, LpOrder::L2, LpOrder::L4}) CHECK(lp_distance(d, d, o) == 0.0);
  CHECK(lp_distance(Distribution({1, 0}), Distribution({0, 1}), LpOrder::L1) == 2.0);
  CHECK(lp_distance(Distribution({0.75, 0.25}), Distribution({0.25, 0.75}), LpOrder::L2) ==
        doctest::Approx(std::sqrt(0.5)));
  for (int t = 0; t < 200; ++t) {
    const auto p = random_distribution(2 + rng.below(50), rng), q = random_distribution(p.size(), rng);
    const double l1 = lp_distance(p, q, LpOrder::L1), l2 = lp_distance(p, q, LpOrder::L2),
                 l4 = lp_distance(p, q, LpOrder::L4);
    CHECK(l4 <= l2 * (1 + 1e-12));
    CHECK(l2 <= l1 * (1 + 1e-12));
    CHECK(l2_distance_sq(p, q) == doctest::Approx(l2 * l2).epsilon(1e-12));
  }
}

TEST_CASE("coarsen") {
  Rng rng(6);
  const auto p = random_distribution(6, rng);
  CHECK(vec(coarsen(p, Partition::singletons(6))) == vec(p));
  CHECK(coarsen(p, Partition(6, {{0, 1, 2, 3, 4, 5}}))[0] == doctest::Approx(1.0));
  const auto c = coarsen(Distribution({0.1, 0.2, 0.3, 0.4}), Partition(4, {{0, 2}, {1, 3}}));
  CHECK(c[0] == doctest::Approx(0.4));
  CHECK(c[1] == doctest::Approx(0.6));
  CHECK(kind_of([&] { coarsen(p, Partition(6, {{0, 1}})); }) == ErrorKind::IncompletePartition);
  CHECK(kind_of([] { Partition(3, {{0, 1}, {1, 2}}); }) == ErrorKind::OverlappingCells);
  CHECK(kind_of([] { Partition(3, {{0}, {}}); }) == ErrorKind::EmptyCell);
  CHECK(kind_of([] { Partition(3, {{0, 3}}); }) == ErrorKind::IndexOutOfRange);
  CHECK_FALSE(Partition(3, {{0, 1}}).cover_all());
}

TEST_CASE("coarsening never increases l1") {
  Rng rng(7);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 2 + rng.below(60);
    const auto p = random_distribution(n, rng), q = random_distribution(n, rng);
    const std::size_t cells = 1 + rng.below(n);
    std::vector<std::vector<std::size_t>> part(cells);
    for (std::size_t x = 0; x < n; ++x) part[x < cells ? x : rng.below(cells)].push_back(x);
    const Partition pt(n, part);
    CHECK(lp_distance(coarsen(p, pt), coarsen(q, pt), LpOrder::L1) <= lp_distance(p, q, LpOrder::L1) + 1e-12);
  }
}

TEST_CASE("restrict_to") {
  const std::vector<std::size_t> cell{1, 3, 4};
  const auto u = restrict_to(Distribution::uniform(6), cell);
  REQUIRE(u);
  for (std::size_t i = 0; i < 3; ++i) CHECK((*u)[i] == doctest::Approx(1.0 / 3));
  const std::vector<std::size_t> tail{2, 3};
  CHECK_FALSE(restrict_to(Distribution({0.5, 0.5, 0, 0}), tail).has_value());
  const std::vector<std::size_t> odd{1, 3};
  const auto r = restrict_to(Distribution({0.1, 0.2, 0.3, 0.4}), odd);
  REQUIRE(r);
  CHECK((*r)[0] == doctest::Approx(1.0 / 3));
  CHECK((*r)[1] == doctest::Approx(2.0 / 3));
  CHECK(restricted_l1(Distribution({0.5, 0.5, 0, 0}), Distribution::uniform(4), tail) == 0.0);
}

TEST_CASE("distance_to_mixture_family examples") {
  Rng rng(8);
  const auto q1 = random_distribution(20, rng), q2 = random_distribution(20, rng);
  const auto on = distance_to_mixture_family(mix(q1, q2, MixtureCandidate(0.4)), q1, q2);
  CHECK(on.distance <= 1e-12);
  CHECK(on.alpha.alpha() == doctest::Approx(0.4).epsilon(1e-9));
  const auto p = random_distribution(20, rng);
  CHECK(distance_to_mixture_family(p, q1, q1).distance == doctest::Approx(lp_distance(p, q1, LpOrder::L1)));
  CHECK(distance_to_mixture_family(Distribution({1, 0, 0}), Distribution({0, 1, 0}), Distribution({0, 0, 1}))
            .distance == doctest::Approx(2.0));
}

TEST_CASE("distance_to_mixture_family agrees with a dense grid") {
  Rng rng(9);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 2 + rng.below(40);
    const auto p = random_distribution(n, rng), q1 = random_distribution(n, rng), q2 = random_distribution(n, rng);
    const auto exact = distance_to_mixture_family(p, q1, q2);
    const auto grid = oracle::grid_family_distance(p, q1, q2, 1e-4);
    CHECK(std::fabs(exact.distance - grid.distance) <= 1e-3);
    CHECK(exact.distance <= grid.distance + 1e-12);
    CHECK(l1_to_mixture(p, q1, q2, exact.alpha.alpha()) == doctest::Approx(exact.distance));
  }
}

TEST_CASE("mixture l2 identity") {
  Rng rng(10);
  for (int t = 0; t < 100; ++t) {
    const auto q1 = random_distribution(15, rng), q2 = random_distribution(15, rng);
    const double a_star = rng.uniform(), a = rng.uniform();
    const auto lhs = l2_distance_sq(mix(q1, q2, MixtureCandidate(a_star)), mix(q1, q2, MixtureCandidate(a)));
    CHECK(lhs == doctest::Approx((a_star - a) * (a_star - a) * l2_distance_sq(q1, q2)).epsilon(1e-9));
  }
}

TEST_CASE("alias table frequencies") {
  Rng rng(11);
  const Distribution d({0.5, 0.0, 0.25, 0.25});
  const AliasTable t(d);
  std::vector<int> hits(4);
  constexpr int draws = 200000;
  for (int i = 0; i < draws; ++i) ++hits[t.draw(rng)];
  CHECK(hits[1] == 0);
  for (std::size_t i = 0; i < 4; ++i) {
    const double sd = std::sqrt(draws * d[i] * (1 - d[i]));
    CHECK(std::fabs(hits[i] - draws * d[i]) <= 5 * sd + 1e-9);
  }
}

TEST_CASE("count vectors") {
  const CountVector a({1, 2, 3}, 6.0), b({0, 1, 1}, 2.0);
  const auto c = a + b;
  CHECK(c.total() == 8);
  CHECK(c.nominal_s() == 8.0);
  const std::vector<std::size_t> cell{0, 2};
  CHECK(a.restricted(cell).total() == 4);
  CHECK(kind_of([&] { (void)(a + CountVector({1}, 1.0)); }) == ErrorKind::DomainMismatch);
  CHECK(kind_of([] { empirical(CountVector({0, 0}, 0.0)); }) == ErrorKind::EmptyCounts);
  CHECK(empirical(a)[2] == doctest::Approx(0.5));
}
