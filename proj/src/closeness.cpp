#include "mixtest/closeness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mixtest/errors.hpp"
#include "mixtest/reshape.hpp"

namespace mixtest {

namespace {

void require_eps(double eps) {
  if (!(eps > 0.0 && eps < 2.0)) fail(ErrorKind::InvalidEpsilon, "closeness eps");
}

void require_same(const CountVector& a, const CountVector& b) {
  if (a.size() != b.size()) fail(ErrorKind::DomainMismatch, "count vectors differ in length");
}

void fill_derived(ClosenessConfig& cfg) {
  cfg.gamma = cfg.eps * cfg.eps / (10.0 * static_cast<double>(cfg.n));
  cfg.s = cfg.c_s * std::sqrt(cfg.b) / (cfg.gamma / 2.0);
  cfg.T = cfg.s * cfg.s * cfg.gamma;
}

// Roots of A x² + B x + c0 = 0 with A > 0 and a positive discriminant,
// returned (smaller, larger) without cancellation.
std::pair<double, double> roots(double A, double B, double c0) {
  const double disc = std::max(0.0, B * B - 4.0 * A * c0);
  const double q = -0.5 * (B + std::copysign(std::sqrt(disc), B));
  double r1 = q / A;
  double r2 = q != 0.0 ? c0 / q : r1;
  if (r1 > r2) std::swap(r1, r2);
  return {r1, r2};
}

}  // namespace

ClosenessConfig make_closeness_config(std::size_t n, double eps, double c_s) {
  require_eps(eps);
  if (n == 0) fail(ErrorKind::EmptyDomain, "closeness config");
  const double nd = static_cast<double>(n);
  const double scale = std::pow(nd, 2.0 / 3.0) / std::pow(eps, 4.0 / 3.0);
  ClosenessConfig cfg;
  cfg.eps = eps;
  cfg.n = n;
  cfg.c_s = c_s;
  cfg.k_flatten = static_cast<std::int64_t>(std::min(nd, std::ceil(scale)));
  cfg.b = 1.0 / std::min(nd, scale);
  fill_derived(cfg);
  return cfg;
}

ClosenessConfig make_closeness_config(std::size_t n, double eps, double b, double c_s) {
  ClosenessConfig cfg = make_closeness_config(n, eps, c_s);
  if (!(b > 0.0)) fail(ErrorKind::InvalidArgument, "b must be > 0");
  cfg.b = b;
  cfg.k_flatten = 0;
  fill_derived(cfg);
  return cfg;
}

ClosenessConfig for_domain(const ClosenessConfig& cfg, std::size_t m) {
  if (m == 0) fail(ErrorKind::EmptyDomain, "closeness domain");
  ClosenessConfig out = cfg;
  out.n = m;
  fill_derived(out);
  return out;
}

double eval_f(const CountVector& X, const CountVector& Y, const CountVector& Z, MixtureCandidate alpha) {
  require_same(X, Y);
  require_same(X, Z);
  const long double a = alpha.alpha();
  const long double b = 1.0L - a;
  long double acc = 0.0L;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const long double x = X[i], y = Y[i], z = Z[i];
    const long double d = x - b * y - a * z;
    acc += d * d - x - b * b * y - a * a * z;
  }
  return static_cast<double>(acc);
}

QuadraticStat extract_coefficients(const CountVector& X, const CountVector& Y, const CountVector& Z) {
  require_same(X, Y);
  require_same(X, Z);
  long double A = 0.0L, B = 0.0L, C = 0.0L;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const long double x = X[i], y = Y[i], z = Z[i];
    A += (y - z) * (y - z) - z - y;
    B += y + x * y + y * z - y * y - x * z;
    C += (x - y) * (x - y) - x - y;
  }
  return {static_cast<double>(A), static_cast<double>(2.0L * B), static_cast<double>(C)};
}

std::vector<double> boundary_candidates(const QuadraticStat& f, double T) {
  std::vector<double> out;
  if (!(f.A > 0.0)) {
    if (f(0.0) <= T) out.push_back(0.0);
    if (f(1.0) <= T) out.push_back(1.0);
    return out;
  }
  const double vertex = -f.B / (2.0 * f.A);
  if (vertex <= 1.0) {
    // f increases on [max(vertex,0), 1]; take the first point with f ≥ −T.
    const double lo = std::max(vertex, 0.0);
    const double at = f(lo);
    if (at <= T) {
      if (at >= -T) {
        out.push_back(lo);
      } else if (f(1.0) >= -T) {
        out.push_back(std::clamp(roots(f.A, f.B, f.C + T).second, lo, 1.0));
      }
    }
  }
  if (vertex >= 0.0) {
    // f decreases on [0, min(vertex,1)]; take the last point with f ≥ −T.
    const double hi = std::min(vertex, 1.0);
    const double at = f(hi);
    if (at <= T) {
      if (at >= -T) {
        out.push_back(hi);
      } else if (f(0.0) >= -T) {
        out.push_back(std::clamp(roots(f.A, f.B, f.C + T).first, 0.0, hi));
      }
    }
  }
  return out;
}

std::vector<MixtureCandidate> find_candidates(const CountVector& X, const CountVector& Y,
                                              const CountVector& Z, const ClosenessConfig& cfg) {
  std::vector<double> alphas{0.0};
  for (double a : boundary_candidates(extract_coefficients(X, Y, Z), cfg.T)) alphas.push_back(a);
  for (double a : boundary_candidates(extract_coefficients(X, Z, Y), cfg.T)) alphas.push_back(1.0 - a);
  std::sort(alphas.begin(), alphas.end());
  std::vector<MixtureCandidate> out;
  for (double a : alphas) {
    a = std::clamp(a, 0.0, 1.0);
    if (!out.empty() && std::fabs(out.back().alpha() - a) <= 1e-9) continue;
    out.emplace_back(a);
  }
  return out;
}

double estimator_budget(double b, double sigma, double c_est) {
  if (!(b > 0.0) || !(sigma > 0.0)) fail(ErrorKind::InvalidArgument, "estimator budget needs b, sigma > 0");
  return c_est * std::sqrt(b) / sigma;
}

double l2_sq_estimate(double b, double sigma, const CountVector& r1_counts, const CountVector& r2_counts) {
  require_same(r1_counts, r2_counts);
  const double s = r1_counts.nominal_s();
  if (s != r2_counts.nominal_s()) fail(ErrorKind::InvalidArgument, "estimator budgets differ");
  if (s < estimator_budget(b, sigma, 1.0)) fail(ErrorKind::InsufficientSamples, "estimator budget");
  long double acc = 0.0L;
  for (std::size_t i = 0; i < r1_counts.size(); ++i) {
    const long double x = r1_counts[i], y = r2_counts[i];
    acc += (x - y) * (x - y) - x - y;
  }
  return static_cast<double>(acc / (static_cast<long double>(s) * s));
}

Verdict closeness_test(const ClosenessConfig& cfg, SampleSource& p_src, SampleSource& q1_src,
                       SampleSource& q2_src, Rng& rng) {
  require_eps(cfg.eps);
  const std::size_t n = p_src.domain_size();
  if (q1_src.domain_size() != n || q2_src.domain_size() != n || cfg.n != n) {
    fail(ErrorKind::DomainMismatch, "closeness inputs");
  }
  const std::int64_t before =
      p_src.samples_drawn() + q1_src.samples_drawn() + q2_src.samples_drawn();

  const FlattenPlan flat = build_flatten_plan(p_src, q1_src, q2_src, cfg.k_flatten, rng);
  const std::size_t m = flat.plan.total_size();
  const ClosenessConfig inner = for_domain(cfg, m);
  ReshapedSource fp(p_src, flat.plan);
  ReshapedSource fq1(q1_src, flat.plan);
  ReshapedSource fq2(q2_src, flat.plan);

  const CountVector X = fp.draw_poisson(inner.s, rng);
  const CountVector Y = fq1.draw_poisson(inner.s, rng);
  const CountVector Z = fq2.draw_poisson(inner.s, rng);
  const std::vector<MixtureCandidate> cands = find_candidates(X, Y, Z, inner);

  const double sigma = cfg.eps * cfg.eps / (2.0 * static_cast<double>(m));
  const double s_est = estimator_budget(cfg.b, sigma, cfg.c_est);
  Verdict v;
  v.statistic = std::numeric_limits<double>::infinity();
  for (const MixtureCandidate& alpha : cands) {
    MixtureSource q_alpha(fq1, fq2, alpha.alpha());
    const CountVector r1 = fp.draw_poisson(s_est, rng);
    const CountVector r2 = q_alpha.draw_poisson(s_est, rng);
    const double est = l2_sq_estimate(cfg.b, sigma, r1, r2);
    v.candidates.push_back(alpha.alpha());
    if (est < v.statistic) {
      v.statistic = est;
      v.details["best_alpha"] = alpha.alpha();
    }
  }
  v.threshold = cfg.accept_factor * sigma;
  v.accepted = v.statistic <= v.threshold;
  v.samples_used = p_src.samples_drawn() + q1_src.samples_drawn() + q2_src.samples_drawn() - before;
  v.details["flattened_size"] = static_cast<double>(m);
  v.details["k_flatten"] = static_cast<double>(cfg.k_flatten);
  v.details["s"] = inner.s;
  v.details["s_est"] = s_est;
  v.details["sigma"] = sigma;
  return v;
}

}  // namespace mixtest
