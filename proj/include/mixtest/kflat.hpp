#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mixtest/distribution.hpp"
#include "mixtest/sources.hpp"
#include "mixtest/verdict.hpp"

namespace mixtest {

inline constexpr double kDefaultUniformityConstant = 32.0;

//==============================================================================
// Bucketing
//==============================================================================

struct Bucket {
  bool low = false;  ///< q(x) ≤ ε′²/n
  int band = -1;     ///< geometric band j ≥ 0 when !low
  std::vector<std::size_t> elements;  ///< ascending
};

/// Low bucket first (when nonempty), then nonempty geometric bands in
/// increasing order. Band j holds (1+ε′)^j ε′²/n < q(x) ≤ (1+ε′)^{j+1} ε′²/n;
/// bands 0 and 1 are kept as ordinary bands.
struct Bucketing {
  std::size_t n = 0;
  double eps_prime = 0.0;
  std::vector<Bucket> buckets;
  std::vector<std::size_t> bucket_of;  ///< element → index into buckets

  std::size_t v() const { return buckets.size(); }
  double low_cut() const;                ///< ε′²/n
  double band_floor(int band) const;     ///< (1+ε′)^band ε′²/n
};

/// Throws InvalidEpsilon unless eps_prime ∈ (0,1).
Bucketing bucket(const Distribution& q, double eps_prime);

//==============================================================================
// Segmentations and divisions
//==============================================================================

struct Interval {
  std::size_t begin = 0;  ///< inclusive
  std::size_t end = 0;    ///< exclusive
  std::size_t size() const { return end - begin; }
};

class Segmentation {
 public:
  Segmentation() = default;
  /// Throws InvalidArgument unless the intervals are nonempty, ordered,
  /// contiguous and cover [0, n).
  Segmentation(std::size_t n, std::vector<Interval> intervals);
  /// Intervals split at the ascending cut points 0 < c_1 < ... < n.
  static Segmentation from_cuts(std::size_t n, const std::vector<std::size_t>& cuts);

  std::size_t domain_size() const { return n_; }
  std::size_t k() const { return intervals_.size(); }
  const std::vector<Interval>& intervals() const { return intervals_; }
  std::size_t interval_of(std::size_t x) const;

 private:
  std::size_t n_ = 0;
  std::vector<Interval> intervals_;
};

struct DivisionCell {
  std::size_t interval = 0;
  std::size_t bucket = 0;
  std::size_t part = 0;
  std::vector<std::size_t> elements;
};

struct Division {
  std::vector<DivisionCell> cells;
  std::size_t t = 0;  ///< k · v
  bool refined = false;

  Partition partition(std::size_t n) const;
};

/// Largest refined cell size ⌈n/t⌉.
std::size_t refined_cap(std::size_t n, std::size_t t);

/// Calls visit(bucket, part, elements) for every cell of [lo, hi) ∩ B_j,
/// splitting a cell of size z > ⌈n/t⌉ into ⌊z t/n⌋ + 1 near-equal runs when
/// t > 0. This is the one place cells are formed.
void for_each_interval_cell(
    const Bucketing& b, std::size_t lo, std::size_t hi, std::size_t t,
    const std::function<void(std::size_t, std::size_t, std::span<const std::size_t>)>& visit);

Division build_division(const Segmentation& seg, const Bucketing& b, bool refine);

//==============================================================================
// Statistics
//==============================================================================

/// Collision estimate Ŝ of ‖p_|cell‖₂²; accept iff Ŝ − 1/m ≤ 1.5 ε′²/m.
/// m = 1 always accepts. Throws EmptyCell, InsufficientSamples (fewer than
/// c_unif √m / ε′² samples).
Verdict uniformity_subtest(const CountVector& cell_counts, double eps_prime,
                           double c_unif = kDefaultUniformityConstant);

/// Empirical pmf coarsened over the division's cells (in cell order).
/// Throws EmptyCounts, IncompletePartition.
Distribution coarsened_empirical(const CountVector& p_counts, const Division& div);

//==============================================================================
// Fitting
//==============================================================================

struct KFlatFit {
  MixtureCandidate alpha{0.0};
  std::vector<double> levels;
  Segmentation segmentation;
  double l1_gap = 0.0;
};

/// Uniformity verdict for the cell `elements` of bucket `bucket`.
using CellVerdicts = std::function<bool(std::size_t bucket, std::span<const std::size_t> elements)>;

/// 0, ε′/2, ε′, ..., with 1 always last.
std::vector<double> alpha_grid(double eps_prime);

struct KFlatSearch {
  std::optional<KFlatFit> fit;  ///< first grid α whose best gap ≤ threshold
  double best_gap;              ///< smallest gap seen over all α (∞ if none finite)
};

/// DP over (prefix, segments used) for every α on the grid. An interval
/// costs ∞ if a non-low refined cell fails its verdict, otherwise the least
/// coarsened ℓ₁ gap over one level c ≥ 0. Throws InvalidK.
KFlatSearch search_kflat(const Distribution& p_hat, const Distribution& q, const Bucketing& b,
                         std::size_t k, double eps_prime, const CellVerdicts& passes, double threshold);

/// search_kflat with threshold 2ε′.
std::optional<KFlatFit> fit_kflat_dp(const Distribution& p_hat, const Distribution& q, const Bucketing& b,
                                     std::size_t k, double eps_prime, const CellVerdicts& passes);

/// r = f / Σf, or uniform when Σf = 0.
Distribution normalize_kflat(const KFlatFit& fit);

/// Per-element fit with no buckets and no uniformity checks; used when
/// k·v > n and p is learned outright.
KFlatSearch search_kflat_elementwise(const Distribution& p_hat, const Distribution& q, std::size_t k,
                                     double eps_prime, double threshold);

//==============================================================================
// Tester
//==============================================================================

struct KFlatConfig {
  double eps = 0.35;
  std::size_t k = 1;
  double c_unif = kDefaultUniformityConstant;
  double c_emp = 4.0;
  double budget_slack = 2.0;
  int repeats = 0;          ///< uniformity amplification; 0 picks the odd count ≥ ln(n² v)
  double c_fallback = 64.0;
};

struct KFlatBudget {
  bool fallback = false;
  std::size_t v = 0;
  std::size_t t = 0;
  int repeats = 1;
  std::int64_t samples = 0;
  double gate = 0.0;  ///< cells with fewer pooled samples skip the uniformity test
};

KFlatBudget kflat_budget(const Bucketing& b, const KFlatConfig& cfg);

/// Throws InvalidEpsilon, InvalidK, DomainMismatch.
Verdict kflat_identity_test(const Distribution& q, const KFlatConfig& cfg, SampleSource& p_source, Rng& rng);

}  // namespace mixtest
