#include <doctest.h>

#include <cmath>
#include <set>

#include "mixtest/errors.hpp"
#include "mixtest/instances.hpp"
#include "mixtest/kflat.hpp"
#include "oracles.hpp"

using namespace mixtest;

namespace {

Segmentation random_segmentation(std::size_t n, std::size_t k, Rng& rng) {
  std::set<std::size_t> cuts;
  while (cuts.size() + 1 < k) cuts.insert(1 + rng.below(n - 1));
  return Segmentation::from_cuts(n, {cuts.begin(), cuts.end()});
}

const CellVerdicts kAll = [](std::size_t, std::span<const std::size_t>) { return true; };

}  // namespace

TEST_CASE("bucketing a uniform distribution") {
  for (double e : {0.01, 0.1, 0.5, 0.9}) {
    constexpr std::size_t n = 37;
    const auto b = bucket(Distribution::uniform(n), e);
    REQUIRE(b.v() == 1);
    const int j = b.buckets[0].band;
    CHECK(b.band_floor(j) < 1.0 / n);
    CHECK(1.0 / n <= b.band_floor(j + 1) * (1 + 1e-12));
  }
}

TEST_CASE("bucketing invariants") {
  Rng rng(1);
  const double e = 0.1;
  const auto low = bucket(Distribution({e * e / 8, 1 - e * e / 8, 0, 0}), e);
  CHECK(low.buckets.front().low);
  CHECK(low.bucket_of[0] == 0);
  CHECK(low.bucket_of[2] == 0);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + rng.below(300);
    const auto q = t % 2 ? random_distribution(n, rng) : zipf_distribution(n, 1.0 + rng.uniform());
    const double ep = 0.01 + 0.5 * rng.uniform();
    const auto b = bucket(q, ep);
    std::size_t covered = 0;
    for (std::size_t j = 0; j < b.v(); ++j) {
      const auto& bk = b.buckets[j];
      covered += bk.elements.size();
      double lo = 1, hi = 0;
      for (std::size_t x : bk.elements) {
        CHECK(b.bucket_of[x] == j);
        lo = std::min(lo, q[x]);
        hi = std::max(hi, q[x]);
        if (bk.low) {
          CHECK(q[x] <= b.low_cut());
        } else {
          CHECK(q[x] > b.band_floor(bk.band));
          CHECK(q[x] <= b.band_floor(bk.band + 1) * (1 + 1e-12));
        }
      }
      if (!bk.low) CHECK(hi / lo <= (1 + ep) * (1 + 1e-12));
    }
    CHECK(covered == n);
  }
  CHECK_THROWS_AS(bucket(Distribution::uniform(3), 1.0), Error);
}

TEST_CASE("segmentations") {
  const auto s = Segmentation::from_cuts(10, {3, 7});
  CHECK(s.k() == 3);
  CHECK(s.interval_of(0) == 0);
  CHECK(s.interval_of(3) == 1);
  CHECK(s.interval_of(9) == 2);
  CHECK_THROWS_AS(Segmentation(5, {{0, 2}, {3, 5}}), Error);
  CHECK_THROWS_AS(Segmentation(5, {{0, 2}, {2, 4}}), Error);
  CHECK_THROWS_AS(Segmentation::from_cuts(5, {0}), Error);
}

TEST_CASE("divisions") {
  Rng rng(2);
  const auto q = random_distribution(40, rng);
  const auto b = bucket(q, 0.2);
  const auto one = build_division(Segmentation::from_cuts(40, {}), b, false);
  REQUIRE(one.cells.size() == b.v());
  for (std::size_t j = 0; j < b.v(); ++j) CHECK(one.cells[j].elements == b.buckets[j].elements);

  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + rng.below(200);
    const auto qq = random_distribution(n, rng);
    const auto bb = bucket(qq, 0.05 + 0.5 * rng.uniform());
    const auto seg = random_segmentation(n, 1 + rng.below(std::min<std::size_t>(n, 5)), rng);
    for (bool refine : {false, true}) {
      const auto d = build_division(seg, bb, refine);
      CHECK(d.partition(n).cover_all());
      for (const auto& c : d.cells) {
        for (std::size_t x : c.elements) {
          CHECK(seg.interval_of(x) == c.interval);
          CHECK(bb.bucket_of[x] == c.bucket);
        }
        if (refine && d.t <= n) CHECK(c.elements.size() <= refined_cap(n, d.t));
      }
      if (refine && d.t <= n) CHECK(d.cells.size() <= 2 * d.t);
    }
  }
}

TEST_CASE("refining a cell of twice the cap gives three parts") {
  // Two levels in different bands, ten elements each: v = 2, and t = 4
  // makes the cap ⌈20/4⌉ = 5.
  std::vector<double> w(20);
  for (std::size_t i = 0; i < 20; ++i) w[i] = i % 2 ? 1.0 : 3.0;
  const auto b = bucket(make_distribution(w), 0.1);
  REQUIRE(b.v() == 2);
  std::vector<std::size_t> sizes;
  for_each_interval_cell(b, 0, 20, 4, [&](std::size_t, std::size_t, std::span<const std::size_t> e) {
    sizes.push_back(e.size());
  });
  CHECK(sizes == std::vector<std::size_t>{4, 3, 3, 4, 3, 3});
}

TEST_CASE("uniformity subtest") {
  Rng rng(3);
  CHECK(uniformity_subtest(CountVector({5}, 5), 0.1).accepted);
  constexpr double ep = 0.05;
  constexpr std::size_t m = 20;
  const auto need = static_cast<std::int64_t>(std::ceil(kDefaultUniformityConstant * std::sqrt(double(m)) / (ep * ep)));
  int acc = 0, rej = 0;
  std::vector<double> point(m, 0.0);
  point[3] = 1.0;
  const Distribution pm(point);
  for (int t = 0; t < 200; ++t) {
    const auto v = uniformity_subtest(sample(Distribution::uniform(m), need, rng), ep);
    CHECK(v.accepted == (v.statistic <= v.threshold));
    acc += v.accepted;
    rej += !uniformity_subtest(sample(pm, need, rng), ep).accepted;
  }
  CHECK(acc >= 120);
  CHECK(rej >= 120);
  CHECK_THROWS_AS(uniformity_subtest(CountVector({1, 1}, 2), ep), Error);
  CHECK_THROWS_AS(uniformity_subtest(CountVector({}, 0), ep), Error);
}

TEST_CASE("coarsened empirical") {
  Rng rng(4);
  const auto q = random_distribution(30, rng);
  const auto b = bucket(q, 0.2);
  const auto d = build_division(Segmentation::from_cuts(30, {10}), b, true);
  std::vector<std::int64_t> c(30, 0);
  c[17] = 9;
  const auto pe = coarsened_empirical(CountVector(c, 9), d);
  double total = 0;
  for (std::size_t i = 0; i < d.cells.size(); ++i) {
    total += pe[i];
    const bool holds = std::find(d.cells[i].elements.begin(), d.cells[i].elements.end(), 17) != d.cells[i].elements.end();
    CHECK(pe[i] == (holds ? 1.0 : 0.0));
  }
  CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("coarsened empirical is accurate on many divisions at once") {
  Rng rng(5);
  constexpr std::size_t n = 200, k = 2;
  constexpr double ep = 0.1;
  const auto q = random_distribution(n, rng);
  const auto p = mix(q, random_kflat(n, k, rng), MixtureCandidate(0.5));
  const auto b = bucket(q, ep);
  const double t = double(k * b.v());
  const auto s = static_cast<std::int64_t>(4.0 * std::min(double(n), t * std::log(double(n))) / (ep * ep));
  std::vector<Segmentation> segs;
  for (int i = 0; i < 20; ++i) segs.push_back(random_segmentation(n, k, rng));
  int good = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto counts = sample(p, s, rng);
    bool all = true;
    for (const auto& seg : segs) {
      const auto d = build_division(seg, b, true);
      all = all && lp_distance(coarsened_empirical(counts, d), coarsen(p, d.partition(n)), LpOrder::L1) <= ep;
    }
    good += all;
  }
  CHECK(good >= 85);
}

TEST_CASE("alpha grid") {
  const auto g = alpha_grid(0.1);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 1.0);
  CHECK(g.size() == 21);
  CHECK(g[1] == doctest::Approx(0.05));
}

TEST_CASE("fit examples") {
  Rng rng(6);
  constexpr double ep = 0.025;
  const auto q = periodic_distribution(40, {1, 2, 3, 5});
  const auto b = bucket(q, ep);
  const auto exact = fit_kflat_dp(q, q, b, 2, ep, kAll);
  REQUIRE(exact);
  CHECK(exact->alpha.alpha() == 0.0);
  CHECK(exact->l1_gap <= 1e-12);

  const auto r = make_distribution(std::vector<double>(40, 1.0));
  std::vector<double> w(40);
  for (std::size_t i = 0; i < 40; ++i) w[i] = i < 15 ? 3.0 : 1.0;
  const auto r2 = make_distribution(w);
  const auto p = mix(q, r2, MixtureCandidate(0.5));
  const auto s = search_kflat(p, q, b, 2, ep, kAll, ep);
  REQUIRE(s.fit);
  CHECK(s.best_gap <= ep);
  for (double level : s.fit->levels) CHECK(level >= 0.0);

  const CellVerdicts none = [](std::size_t, std::span<const std::size_t>) { return false; };
  CHECK_FALSE(fit_kflat_dp(Distribution::uniform(40), Distribution::uniform(40), bucket(Distribution::uniform(40), ep),
                           2, ep, none));
  CHECK_THROWS_AS(fit_kflat_dp(q, q, b, 0, ep, kAll), Error);
  (void)r;
}

TEST_CASE("dynamic program matches exhaustive search") {
  Rng rng(7);
  for (int i = 0; i < 20; ++i) {
    const std::size_t n = 6 + rng.below(12);
    const std::size_t k = 1 + rng.below(3);
    const double ep = 0.05 + 0.2 * rng.uniform();
    const auto q = random_distribution(n, rng);
    const auto p = mix(q, random_kflat(n, k, rng), MixtureCandidate(rng.uniform()));
    const auto b = bucket(q, ep);
    const CellVerdicts some = [i](std::size_t j, std::span<const std::size_t> e) {
      return (j + e.size() + e.front() + i) % 7 != 0;
    };
    const double threshold = 2 * ep;
    const auto ref = oracle::exhaustive_kflat(p, q, b, k, ep, some, threshold);
    const auto dp = search_kflat(p, q, b, k, ep, some, threshold);
    CHECK(dp.fit.has_value() == ref.alpha.has_value());
    if (dp.fit && ref.alpha) CHECK(dp.fit->alpha.alpha() == *ref.alpha);
    if (std::isfinite(ref.best_gap)) CHECK(dp.best_gap == doctest::Approx(ref.best_gap).epsilon(1e-9));
  }
}

TEST_CASE("elementwise search matches brute force over singleton cells") {
  Rng rng(8);
  for (int i = 0; i < 20; ++i) {
    const std::size_t n = 4 + rng.below(8);
    const std::size_t k = 1 + rng.below(3);
    const double ep = 0.05 + 0.2 * rng.uniform();
    const auto q = random_distribution(n, rng), p = random_distribution(n, rng);
    const auto got = search_kflat_elementwise(p, q, k, ep, 10.0);
    double best = 1e300;
    for (double a : alpha_grid(ep)) {
      // Segmentations into exactly k pieces via bitmask of cut positions.
      for (unsigned mask = 0; mask < (1u << (n - 1)); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != k - 1) continue;
        double total = 0;
        std::size_t lo = 0;
        for (std::size_t hi = 1; hi <= n; ++hi) {
          if (hi < n && !(mask >> (hi - 1) & 1u)) continue;
          std::vector<double> pc, qc, sz;
          for (std::size_t x = lo; x < hi; ++x) {
            pc.push_back(p[x]);
            qc.push_back(q[x]);
            sz.push_back(1.0);
          }
          total += oracle::brute_level_cost(pc, qc, sz, a);
          lo = hi;
        }
        best = std::min(best, total);
      }
    }
    CHECK(got.best_gap == doctest::Approx(best).epsilon(1e-9));
  }
}

TEST_CASE("normalizing a fit") {
  KFlatFit zero{MixtureCandidate(0.01), {0.0, 0.0}, Segmentation::from_cuts(6, {2}), 0.0};
  const auto u = normalize_kflat(zero);
  for (double x : u.pmf()) CHECK(x == doctest::Approx(1.0 / 6));
  KFlatFit f{MixtureCandidate(0.5), {1.0, 3.0}, Segmentation::from_cuts(4, {2}), 0.0};
  const auto r = normalize_kflat(f);
  CHECK(r[0] == doctest::Approx(1.0 / 8));
  CHECK(r[3] == doctest::Approx(3.0 / 8));
}

TEST_CASE("k-flat budget") {
  const auto q = periodic_distribution(60, {1, 2, 3, 5});
  KFlatConfig cfg;
  cfg.k = 2;
  const auto b = bucket(q, cfg.eps / 14);
  const auto budget = kflat_budget(b, cfg);
  CHECK_FALSE(budget.fallback);
  CHECK(budget.t == 2 * b.v());
  CHECK(budget.repeats % 2 == 1);
  CHECK(budget.repeats >= std::log(60.0 * 60.0 * double(b.v())));
  CHECK(budget.gate == doctest::Approx(b.eps_prime * double(budget.samples) / (4.0 * double(budget.t))));

  Rng rng(9);
  const auto wide = random_distribution(10, rng);
  cfg.k = 3;
  CHECK(kflat_budget(bucket(wide, cfg.eps / 14), cfg).fallback);
}

TEST_CASE("k-flat tester, small") {
  Rng rng(10);
  constexpr std::size_t n = 60;
  const auto q = periodic_distribution(n, {1, 2, 3, 5});
  KFlatConfig cfg;
  cfg.k = 2;
  int acc_q = 0, acc_far = 0;
  for (int t = 0; t < 6; ++t) {
    DistributionSource same(q);
    const auto v = kflat_identity_test(q, cfg, same, rng);
    CHECK(v.samples_used == same.samples_drawn());
    acc_q += v.accepted;
    DistributionSource far(gen_kflat_far_instance(q, 2, cfg.eps, rng));
    acc_far += kflat_identity_test(q, cfg, far, rng).accepted;
  }
  CHECK(acc_q >= 4);
  CHECK(acc_far <= 2);

  // Fallback path: k·v exceeds n.
  const auto wide = random_distribution(10, rng);
  cfg.k = 3;
  int acc_wide = 0;
  for (int t = 0; t < 6; ++t) {
    DistributionSource s(wide);
    const auto v = kflat_identity_test(wide, cfg, s, rng);
    CHECK(v.details.at("fallback") == 1.0);
    acc_wide += v.accepted;
  }
  CHECK(acc_wide >= 4);

  DistributionSource s(q);
  cfg.k = 0;
  CHECK_THROWS_AS(kflat_identity_test(q, cfg, s, rng), Error);
  cfg.k = 2;
  cfg.eps = 2.0;
  CHECK_THROWS_AS(kflat_identity_test(q, cfg, s, rng), Error);
}
