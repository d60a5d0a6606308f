#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mixtest/rng.hpp"

namespace mixtest {

inline constexpr double kNormalizationTolerance = 1e-12;

/// Dense pmf over {0, ..., n-1}. Immutable.
class Distribution {
 public:
  /// Throws EmptyDomain, NegativeWeight, or NotNormalized when the sum is
  /// more than kNormalizationTolerance away from 1. Renormalizes otherwise.
  explicit Distribution(std::vector<double> pmf);

  static Distribution uniform(std::size_t n);

  std::size_t size() const { return pmf_.size(); }
  double operator[](std::size_t i) const { return pmf_[i]; }
  std::span<const double> pmf() const { return pmf_; }

  /// Sum of masses over `cell`. Throws IndexOutOfRange.
  double mass(std::span<const std::size_t> cell) const;

 private:
  std::vector<double> pmf_;
};

class CountVector {
 public:
  CountVector() = default;
  CountVector(std::vector<std::int64_t> counts, double nominal_s);

  std::size_t size() const { return counts_.size(); }
  std::int64_t total() const { return total_; }
  double nominal_s() const { return nominal_s_; }
  std::int64_t operator[](std::size_t i) const { return counts_[i]; }
  std::span<const std::int64_t> counts() const { return counts_; }

  /// Counts on `cell` only; nominal size becomes the restricted total.
  CountVector restricted(std::span<const std::size_t> cell) const;

 private:
  std::vector<std::int64_t> counts_;
  std::int64_t total_ = 0;
  double nominal_s_ = 0.0;
};

/// Elementwise sum; nominal sizes add. Throws DomainMismatch.
CountVector operator+(const CountVector& a, const CountVector& b);

class MixtureCandidate {
 public:
  /// Throws InvalidAlpha outside [0, 1].
  explicit MixtureCandidate(double alpha);
  double alpha() const { return alpha_; }
  friend bool operator==(const MixtureCandidate&, const MixtureCandidate&) = default;

 private:
  double alpha_;
};

/// Disjoint cells over {0, ..., n-1}; cover_all is computed, not asserted.
class Partition {
 public:
  /// Throws IndexOutOfRange, OverlappingCells, EmptyCell.
  Partition(std::size_t n, std::vector<std::vector<std::size_t>> cells);

  static Partition singletons(std::size_t n);

  std::size_t domain_size() const { return n_; }
  const std::vector<std::vector<std::size_t>>& cells() const { return cells_; }
  bool cover_all() const { return cover_all_; }

 private:
  std::size_t n_;
  std::vector<std::vector<std::size_t>> cells_;
  bool cover_all_;
};

enum class LpOrder { L1 = 1, L2 = 2, L4 = 4 };

/// Throws EmptyDomain, NegativeWeight, ZeroMass.
Distribution make_distribution(std::span<const double> weights);

/// Throws EmptyCounts when the total is zero.
Distribution empirical(const CountVector& counts);

Distribution mix(const Distribution& q1, const Distribution& q2, MixtureCandidate alpha);

/// Multinomial counts of `count` draws.
CountVector sample(const Distribution& d, std::int64_t count, Rng& rng);

/// Independent Poisson(s * d(i)) counts. Redrawn if the total exceeds 100 s.
CountVector poisson_sample(const Distribution& d, double s, Rng& rng);

double lp_distance(const Distribution& p, const Distribution& q, LpOrder order);
double l2_distance_sq(const Distribution& p, const Distribution& q);

/// Throws IncompletePartition unless the partition covers the domain.
Distribution coarsen(const Distribution& p, const Partition& part);

/// Conditional distribution on `cell`, or nullopt when p(cell) = 0.
std::optional<Distribution> restrict_to(const Distribution& p, std::span<const std::size_t> cell);

/// ‖p_|cell − q_|cell‖₁, taken as 0 when either side has zero mass on the cell.
double restricted_l1(const Distribution& p, const Distribution& q, std::span<const std::size_t> cell);

struct FamilyDistance {
  double distance;
  MixtureCandidate alpha;
};

/// Exact min over α ∈ [0,1] of ‖p − ((1−α)q1 + αq2)‖₁.
FamilyDistance distance_to_mixture_family(const Distribution& p, const Distribution& q1,
                                          const Distribution& q2);

/// ‖p − ((1−α)q1 + αq2)‖₁ without materializing the mixture.
double l1_to_mixture(const Distribution& p, const Distribution& q1, const Distribution& q2,
                     double alpha);

/// Vose alias table for O(1) single draws.
class AliasTable {
 public:
  explicit AliasTable(const Distribution& d);
  std::size_t draw(Rng& rng) const;

 private:
  std::vector<double> prob_;
  std::vector<std::size_t> alias_;
};

}  // namespace mixtest
