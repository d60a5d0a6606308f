#include "mixtest/instances.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mixtest/errors.hpp"

namespace mixtest {

//==============================================================================
// Random distributions
//==============================================================================

Distribution random_distribution(std::size_t n, Rng& rng) {
  if (n == 0) fail(ErrorKind::EmptyDomain, "random distribution");
  std::vector<double> w(n);
  for (double& x : w) x = -std::log1p(-rng.uniform());
  return make_distribution(w);
}

Distribution zipf_distribution(std::size_t n, double s) {
  if (n == 0) fail(ErrorKind::EmptyDomain, "zipf");
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = std::pow(static_cast<double>(i + 1), -s);
  return make_distribution(w);
}

Distribution two_step_distribution(std::size_t n, double hi_fraction, double hi_mass) {
  if (n == 0) fail(ErrorKind::EmptyDomain, "two_step");
  if (!(hi_fraction > 0.0 && hi_fraction <= 1.0) || !(hi_mass >= 0.0 && hi_mass <= 1.0)) {
    fail(ErrorKind::InvalidArgument, "two_step parameters");
  }
  const auto hi = std::min<std::size_t>(n, static_cast<std::size_t>(std::ceil(hi_fraction * static_cast<double>(n))));
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = i < hi ? hi_mass / static_cast<double>(hi)
                  : (hi == n ? 0.0 : (1.0 - hi_mass) / static_cast<double>(n - hi));
  }
  return make_distribution(w);
}

Distribution random_kflat(std::size_t n, std::size_t k, Rng& rng) {
  if (k < 1 || k > n) fail(ErrorKind::InvalidK, "k must lie in [1, n]");
  std::vector<std::size_t> all(n - 1);
  std::iota(all.begin(), all.end(), std::size_t{1});
  std::shuffle(all.begin(), all.end(), rng);
  std::vector<std::size_t> cuts(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k - 1));
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(n);
  std::vector<double> w(n);
  std::size_t at = 0;
  for (std::size_t c : cuts) {
    const double level = -std::log1p(-rng.uniform());
    for (; at < c; ++at) w[at] = level;
  }
  return make_distribution(w);
}

Distribution periodic_distribution(std::size_t n, const std::vector<double>& levels) {
  if (levels.empty()) fail(ErrorKind::InvalidArgument, "periodic levels");
  std::vector<double> w(n);
  for (std::size_t x = 0; x < n; ++x) w[x] = levels[x % levels.size()];
  return make_distribution(w);
}

//==============================================================================
// Hard and far instances
//==============================================================================

LbInstance gen_lb_instance(std::size_t n, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) fail(ErrorKind::InvalidEpsilon, "lower-bound eps must lie in (0,1)");
  const double nd = static_cast<double>(n);
  const double a = 4.0 * eps / nd;
  const double b = std::pow(eps, 4.0 / 3.0) / std::pow(nd, 2.0 / 3.0);
  const auto size_a = static_cast<std::size_t>(std::llround((1.0 - eps) / b));
  const auto size_b = static_cast<std::size_t>(std::llround(eps / a));
  if (size_a < 1 || size_b < 1 || size_a + 2 * size_b > n) {
    fail(ErrorKind::InfeasibleParameters, "sets A, B, C do not fit in the domain");
  }
  LbInstance out{Distribution::uniform(1), Distribution::uniform(1), {}, {}, {}, 0.0, 0.0, false, 0.0};
  out.b_level = (1.0 - eps) / static_cast<double>(size_a);
  out.a_level = eps / static_cast<double>(size_b);
  std::vector<double> p(n, 0.0), q(n, 0.0);
  for (std::size_t x = 0; x < size_a; ++x) {
    out.A_set.push_back(x);
    p[x] = q[x] = out.b_level;
  }
  for (std::size_t x = size_a; x < size_a + size_b; ++x) {
    out.B_set.push_back(x);
    p[x] = out.a_level;
  }
  for (std::size_t x = size_a + size_b; x < size_a + 2 * size_b; ++x) {
    out.C_set.push_back(x);
    q[x] = out.a_level;
  }
  out.p_star = make_distribution(p);
  out.q_star = make_distribution(q);
  out.in_regime = eps >= std::pow(4.0, 0.75) / std::pow(nd, 0.25);
  out.distance = distance_to_mixture_family(out.p_star, out.q_star, Distribution::uniform(n)).distance;
  if (out.distance < eps) fail(ErrorKind::InfeasibleParameters, "instance is not eps-far after rounding");
  return out;
}

namespace {

// Removes from r its components along `dirs` under ⟨x, y⟩ = Σ w x y.
void project_out(std::vector<double>& r, const std::vector<std::vector<double>>& dirs,
                 std::span<const double> w) {
  std::vector<std::vector<double>> basis;
  auto dot = [&](const std::vector<double>& x, const std::vector<double>& y) {
    long double acc = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i) acc += w[i] * x[i] * y[i];
    return static_cast<double>(acc);
  };
  for (std::vector<double> d : dirs) {
    for (const auto& e : basis) {
      const double c = dot(d, e);
      for (std::size_t i = 0; i < d.size(); ++i) d[i] -= c * e[i];
    }
    const double norm = std::sqrt(dot(d, d));
    if (norm <= 1e-14) continue;
    for (double& x : d) x /= norm;
    basis.push_back(std::move(d));
  }
  for (const auto& e : basis) {
    const double c = dot(r, e);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= c * e[i];
  }
}

}  // namespace

Distribution gen_far_instance(const Distribution& q1, const Distribution& q2, double eps, Rng& rng) {
  if (!(eps > 0.0 && eps < 2.0)) fail(ErrorKind::InvalidEpsilon, "far-instance eps");
  if (q1.size() != q2.size()) fail(ErrorKind::DomainMismatch, "far-instance components");
  const std::size_t n = q1.size();
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = q1[i] - q2[i];
  int steps = 0;
  constexpr int kMaxSteps = 1000;
  while (steps < kMaxSteps) {
    const Distribution p0 = mix(q1, q2, MixtureCandidate(rng.uniform()));
    std::vector<double> r(n);
    for (double& x : r) x = rng.uniform() < 0.5 ? -1.0 : 1.0;
    // Orthogonality of v = p0 ∘ r to 1 and to q1 − q2 in the plain inner
    // product is orthogonality of r under the p0-weighted one.
    project_out(r, {std::vector<double>(n, 1.0), diff}, p0.pmf());
    double peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (p0[i] > 0.0) peak = std::max(peak, std::fabs(r[i]));
    }
    ++steps;
    if (peak <= 0.0) continue;
    auto at = [&](double t) {
      std::vector<double> w(n);
      for (std::size_t i = 0; i < n; ++i) w[i] = std::max(0.0, p0[i] * (1.0 + t * r[i] / peak));
      return make_distribution(w);
    };
    auto dist = [&](const Distribution& p) { return distance_to_mixture_family(p, q1, q2).distance; };
    if (dist(at(1.0)) < eps) continue;
    // Distance to a convex family along a ray is nondecreasing in t.
    double lo = 0.0, hi = 1.0;
    while (steps < kMaxSteps) {
      const double mid = 0.5 * (lo + hi);
      const Distribution p = at(mid);
      const double d = dist(p);
      ++steps;
      if (d >= eps && d <= 1.5 * eps) return p;
      (d < eps ? lo : hi) = mid;
    }
  }
  fail(ErrorKind::Infeasible, "no far instance within the step budget");
}

//==============================================================================
// k-flat family oracle
//==============================================================================

namespace {

struct Piece {
  double marginal;  // objective change per unit of α-mass
  double capacity;  // α-mass the piece can absorb
};

// min Σ_j Σ_{x∈I_j} |res_x − u_j| s.t. Σ_j |I_j| u_j = budget, u ≥ 0.
// Each term is convex piecewise linear in u_j, so filling the cheapest
// marginal pieces first is optimal.
double allocate(std::span<const double> res, const std::vector<std::size_t>& bounds, double budget,
                std::vector<Piece>& pieces, std::vector<double>& scratch) {
  pieces.clear();
  long double base = 0.0L;
  for (std::size_t j = 0; j + 1 < bounds.size(); ++j) {
    const double w = static_cast<double>(bounds[j + 1] - bounds[j]);
    scratch.clear();
    long double slope = 0.0L;
    for (std::size_t x = bounds[j]; x < bounds[j + 1]; ++x) {
      base += std::fabs(res[x]);
      if (res[x] > 0.0) {
        scratch.push_back(res[x]);
        slope -= 1.0L;
      } else {
        slope += 1.0L;
      }
    }
    std::sort(scratch.begin(), scratch.end());
    double at = 0.0;
    for (double bp : scratch) {
      pieces.push_back({static_cast<double>(slope) / w, w * (bp - at)});
      at = bp;
      slope += 2.0L;
    }
    pieces.push_back({static_cast<double>(slope) / w, std::numeric_limits<double>::infinity()});
  }
  std::sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) { return a.marginal < b.marginal; });
  long double total = base;
  double left = budget;
  for (const Piece& pc : pieces) {
    if (left <= 0.0) break;
    const double take = std::min(left, pc.capacity);
    total += static_cast<long double>(take) * pc.marginal;
    left -= take;
  }
  return static_cast<double>(total);
}

template <typename F>
void for_each_cut_set(std::size_t n, std::size_t k, F&& visit) {
  std::vector<std::size_t> cuts(k - 1);
  for (std::size_t i = 0; i + 1 < k; ++i) cuts[i] = i + 1;
  for (;;) {
    visit(cuts);
    // Next combination of k−1 cut points from {1, ..., n−1}.
    std::size_t i = k - 1;
    while (i > 0 && cuts[i - 1] == n - (k - 1) + (i - 1)) --i;
    if (i == 0) return;
    ++cuts[i - 1];
    for (std::size_t j = i; j < k - 1; ++j) cuts[j] = cuts[j - 1] + 1;
  }
}

}  // namespace

KFlatDistance kflat_family_distance(const Distribution& p, const Distribution& q, std::size_t k,
                                    double alpha_step) {
  const std::size_t n = q.size();
  if (p.size() != n) fail(ErrorKind::DomainMismatch, "k-flat oracle");
  if (k < 1 || k > n) fail(ErrorKind::InvalidK, "k must lie in [1, n]");
  if (!(alpha_step > 0.0 && alpha_step <= 1.0)) fail(ErrorKind::InvalidArgument, "alpha step");
  std::vector<std::vector<std::size_t>> segs;
  for_each_cut_set(n, k, [&](const std::vector<std::size_t>& cuts) {
    std::vector<std::size_t> bounds{0};
    bounds.insert(bounds.end(), cuts.begin(), cuts.end());
    bounds.push_back(n);
    segs.push_back(std::move(bounds));
  });
  KFlatDistance out{std::numeric_limits<double>::infinity(), 0.0, 0.0};
  std::vector<double> res(n);
  std::vector<Piece> pieces;
  std::vector<double> scratch;
  const auto steps = static_cast<std::size_t>(std::ceil(1.0 / alpha_step));
  for (std::size_t s = 0; s <= steps; ++s) {
    const double alpha = std::min(1.0, static_cast<double>(s) * alpha_step);
    for (std::size_t x = 0; x < n; ++x) res[x] = p[x] - (1.0 - alpha) * q[x];
    for (const auto& bounds : segs) {
      const double d = allocate(res, bounds, alpha, pieces, scratch);
      if (d < out.grid_min) {
        out.grid_min = d;
        out.alpha = alpha;
      }
    }
  }
  out.lower_bound = out.grid_min - alpha_step;
  return out;
}

Distribution gen_kflat_far_instance(const Distribution& q, std::size_t k, double eps, Rng& rng) {
  if (!(eps > 0.0 && eps < 2.0)) fail(ErrorKind::InvalidEpsilon, "far-instance eps");
  const std::size_t n = q.size();
  const Bucketing b = bucket(q, eps / 14.0);
  std::vector<double> z(n, 0.0);
  for (const Bucket& bk : b.buckets) {
    std::vector<std::size_t> e = bk.elements;
    std::shuffle(e.begin(), e.end(), rng);
    for (std::size_t i = 0; i < e.size(); ++i) z[e[i]] = i % 2 == 0 ? 1.0 : -1.0;
  }
  for (int step = 1; step <= 50; ++step) {
    const double t = 0.02 * step;
    std::vector<double> w(n);
    for (std::size_t x = 0; x < n; ++x) w[x] = q[x] * (1.0 + t * z[x]);
    const Distribution p = make_distribution(w);
    if (kflat_family_distance(p, q, k, 0.01).lower_bound < eps) continue;
    if (kflat_family_distance(p, q, k, 1e-3).lower_bound >= eps) return p;
  }
  fail(ErrorKind::Infeasible, "perturbation cannot reach the requested distance");
}

}  // namespace mixtest
