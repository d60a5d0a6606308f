#pragma once

#include <cstdint>
#include <vector>

#include "mixtest/distribution.hpp"
#include "mixtest/sources.hpp"
#include "mixtest/verdict.hpp"

namespace mixtest {

inline constexpr double kDefaultCandidateConstant = 64.0;
inline constexpr double kDefaultEstimatorConstant = 256.0;

/// f(α) = Aα² + Bα + C in squared-count units.
struct QuadraticStat {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double operator()(double alpha) const { return (A * alpha + B) * alpha + C; }
};

struct ClosenessConfig {
  double eps = 0.0;
  std::size_t n = 0;  ///< domain the statistics live on
  double b = 0.0;     ///< ℓ₂² bound for the three distributions on that domain
  double gamma = 0.0; ///< eps² / (10 n)
  double s = 0.0;     ///< c_s √b / (γ/2)
  double T = 0.0;     ///< s² γ
  double c_s = kDefaultCandidateConstant;
  std::int64_t k_flatten = 0;
  double c_est = kDefaultEstimatorConstant;
  double accept_factor = 1.0;  ///< accept iff some estimate ≤ accept_factor · σ
};

/// k_flatten = min(n, ⌈n^{2/3}/eps^{4/3}⌉), b = 1/min(n, n^{2/3}/eps^{4/3}).
/// Throws InvalidEpsilon, EmptyDomain.
ClosenessConfig make_closeness_config(std::size_t n, double eps, double c_s = kDefaultCandidateConstant);

/// Same with an explicit ℓ₂² bound b (no flattening assumed).
ClosenessConfig make_closeness_config(std::size_t n, double eps, double b, double c_s);

/// Recomputes γ, s, T for statistics on a domain of size m; b and k kept.
ClosenessConfig for_domain(const ClosenessConfig& cfg, std::size_t m);

/// Σ (X − (1−α)Y − αZ)² − X − (1−α)²Y − α²Z. Throws DomainMismatch.
double eval_f(const CountVector& X, const CountVector& Y, const CountVector& Z, MixtureCandidate alpha);

QuadraticStat extract_coefficients(const CountVector& X, const CountVector& Y, const CountVector& Z);

/// Closest points to the vertex on each side with |f| ≤ T, in the given
/// orientation. Empty sides are omitted.
std::vector<double> boundary_candidates(const QuadraticStat& f, double T);

/// {0} ∪ candidates from (Y,Z) ∪ candidates from (Z,Y) mapped by α ↦ 1−α;
/// near-duplicates merged, at most 5 values, ascending.
std::vector<MixtureCandidate> find_candidates(const CountVector& X, const CountVector& Y,
                                              const CountVector& Z, const ClosenessConfig& cfg);

/// Poisson budget for the ℓ₂² estimator: c_est · √b / sigma.
double estimator_budget(double b, double sigma, double c_est = kDefaultEstimatorConstant);

/// (1/s²) Σ (X − Y)² − X − Y with s the shared nominal budget.
/// Throws DomainMismatch, InvalidArgument (budgets differ), InsufficientSamples
/// (s below √b / sigma).
double l2_sq_estimate(double b, double sigma, const CountVector& r1_counts, const CountVector& r2_counts);

/// Flatten, extract candidates, verify each by ℓ₂² estimation against
/// σ = eps²/(2|D|). Throws InvalidEpsilon, DomainMismatch.
Verdict closeness_test(const ClosenessConfig& cfg, SampleSource& p_src, SampleSource& q1_src,
                       SampleSource& q2_src, Rng& rng);

}  // namespace mixtest
