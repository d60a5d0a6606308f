#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mixtest/distribution.hpp"
#include "mixtest/sources.hpp"

namespace mixtest {

/// Element i of the original domain becomes a_i equal-mass buckets, laid
/// out contiguously: bucket j of i has flat index offsets[i] + j.
class ReshapePlan {
 public:
  /// Throws InvalidArgument if some a_i < 1, EmptyDomain if a is empty.
  explicit ReshapePlan(std::vector<std::int64_t> a);

  std::size_t domain_size() const { return a_.size(); }
  std::size_t total_size() const { return total_; }
  std::int64_t a(std::size_t i) const { return a_[i]; }
  std::size_t offset(std::size_t i) const { return offsets_[i]; }
  const std::vector<std::int64_t>& buckets() const { return a_; }

 private:
  std::vector<std::int64_t> a_;
  std::vector<std::size_t> offsets_;
  std::size_t total_ = 0;
};

/// a_i = ⌊n q_α(i)⌋ + ⌊n |q_α(i) − q2(i)| / ‖q_α − q2‖₁⌋ + 1, middle term 0
/// when q_α = q2. Throws DomainMismatch.
ReshapePlan build_reshape_plan(const Distribution& q_alpha, const Distribution& q2);

/// Mass of (i, j) is d(i) / a_i. Throws DomainMismatch.
Distribution reshape_distribution(const Distribution& d, const ReshapePlan& plan);

/// Flat index of a uniformly chosen bucket of element i. Throws IndexOutOfRange.
std::size_t reshape_sample(std::size_t i, const ReshapePlan& plan, Rng& rng);

/// Sends each counted sample of element i to a uniform bucket of i.
CountVector reshape_counts(const CountVector& counts, const ReshapePlan& plan, Rng& rng);

struct FlattenPlan {
  ReshapePlan plan;                   ///< a_i = b_i
  std::vector<std::int64_t> pooled;  ///< occurrences of i among the 3k samples
  std::int64_t k_flatten = 0;
};

/// k draws from each distribution; b_i = pooled count + 1.
FlattenPlan build_flatten_plan(const Distribution& p, const Distribution& q1, const Distribution& q2,
                               std::int64_t k, Rng& rng);

/// Same, drawing through sample access.
FlattenPlan build_flatten_plan(SampleSource& p, SampleSource& q1, SampleSource& q2, std::int64_t k,
                               Rng& rng);

/// A source viewed through a reshape plan. Draws are charged to the base.
class ReshapedSource final : public SampleSource {
 public:
  ReshapedSource(SampleSource& base, const ReshapePlan& plan);

  std::size_t domain_size() const override { return plan_.total_size(); }
  std::size_t draw(Rng& rng) override;
  CountVector draw_counts(std::int64_t m, Rng& rng) override;
  CountVector draw_poisson(double s, Rng& rng) override;

 private:
  SampleSource& base_;
  const ReshapePlan& plan_;
};

}  // namespace mixtest
