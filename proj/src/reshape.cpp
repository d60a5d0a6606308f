#include "mixtest/reshape.hpp"

#include <cmath>
#include <string>

#include "mixtest/errors.hpp"

namespace mixtest {

namespace {

// Guards floors like ⌊n · (1/n)⌋ against landing one below an exact integer.
constexpr double kFloorSlack = 1e-9;

std::int64_t floor_with_slack(double x) {
  return static_cast<std::int64_t>(std::floor(x + kFloorSlack));
}

}  // namespace

ReshapePlan::ReshapePlan(std::vector<std::int64_t> a) : a_(std::move(a)), offsets_(a_.size()) {
  if (a_.empty()) fail(ErrorKind::EmptyDomain, "empty reshape plan");
  for (std::size_t i = 0; i < a_.size(); ++i) {
    if (a_[i] < 1) fail(ErrorKind::InvalidArgument, "bucket count must be >= 1");
    offsets_[i] = total_;
    total_ += static_cast<std::size_t>(a_[i]);
  }
}

ReshapePlan build_reshape_plan(const Distribution& q_alpha, const Distribution& q2) {
  if (q_alpha.size() != q2.size()) fail(ErrorKind::DomainMismatch, "reshape plan");
  const std::size_t n = q_alpha.size();
  const double nd = static_cast<double>(n);
  const double gap = lp_distance(q_alpha, q2, LpOrder::L1);
  std::vector<std::int64_t> a(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t first = floor_with_slack(nd * q_alpha[i]);
    const std::int64_t middle =
        gap > 0.0 ? floor_with_slack(nd * std::fabs(q_alpha[i] - q2[i]) / gap) : 0;
    a[i] = first + middle + 1;
  }
  return ReshapePlan(std::move(a));
}

Distribution reshape_distribution(const Distribution& d, const ReshapePlan& plan) {
  if (d.size() != plan.domain_size()) fail(ErrorKind::DomainMismatch, "reshape_distribution");
  std::vector<double> out(plan.total_size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double share = d[i] / static_cast<double>(plan.a(i));
    for (std::int64_t j = 0; j < plan.a(i); ++j) out[plan.offset(i) + static_cast<std::size_t>(j)] = share;
  }
  return Distribution(std::move(out));
}

std::size_t reshape_sample(std::size_t i, const ReshapePlan& plan, Rng& rng) {
  if (i >= plan.domain_size()) fail(ErrorKind::IndexOutOfRange, "element " + std::to_string(i));
  const std::int64_t a = plan.a(i);
  const std::uint64_t j = a == 1 ? 0 : rng.below(static_cast<std::uint64_t>(a));
  return plan.offset(i) + static_cast<std::size_t>(j);
}

CountVector reshape_counts(const CountVector& counts, const ReshapePlan& plan, Rng& rng) {
  if (counts.size() != plan.domain_size()) fail(ErrorKind::DomainMismatch, "reshape_counts");
  std::vector<std::int64_t> out(plan.total_size(), 0);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    std::int64_t left = counts[i];
    const std::int64_t a = plan.a(i);
    for (std::int64_t j = 0; j < a && left > 0; ++j) {
      const std::int64_t c = j + 1 == a ? left : rng.binomial(left, 1.0 / static_cast<double>(a - j));
      out[plan.offset(i) + static_cast<std::size_t>(j)] = c;
      left -= c;
    }
  }
  return CountVector(std::move(out), counts.nominal_s());
}

namespace {

FlattenPlan pooled_plan(const CountVector& a, const CountVector& b, const CountVector& c,
                        std::int64_t k) {
  std::vector<std::int64_t> pooled(a.size());
  std::vector<std::int64_t> buckets(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    pooled[i] = a[i] + b[i] + c[i];
    buckets[i] = pooled[i] + 1;
  }
  return FlattenPlan{ReshapePlan(std::move(buckets)), std::move(pooled), k};
}

}  // namespace

FlattenPlan build_flatten_plan(const Distribution& p, const Distribution& q1, const Distribution& q2,
                               std::int64_t k, Rng& rng) {
  if (p.size() != q1.size() || p.size() != q2.size()) fail(ErrorKind::DomainMismatch, "flatten plan");
  if (k < 0) fail(ErrorKind::InvalidArgument, "negative flatten budget");
  const CountVector a = sample(p, k, rng);
  const CountVector b = sample(q1, k, rng);
  const CountVector c = sample(q2, k, rng);
  return pooled_plan(a, b, c, k);
}

FlattenPlan build_flatten_plan(SampleSource& p, SampleSource& q1, SampleSource& q2, std::int64_t k,
                               Rng& rng) {
  if (p.domain_size() != q1.domain_size() || p.domain_size() != q2.domain_size()) {
    fail(ErrorKind::DomainMismatch, "flatten plan");
  }
  if (k < 0) fail(ErrorKind::InvalidArgument, "negative flatten budget");
  const CountVector a = p.draw_counts(k, rng);
  const CountVector b = q1.draw_counts(k, rng);
  const CountVector c = q2.draw_counts(k, rng);
  return pooled_plan(a, b, c, k);
}

ReshapedSource::ReshapedSource(SampleSource& base, const ReshapePlan& plan) : base_(base), plan_(plan) {
  if (base.domain_size() != plan.domain_size()) fail(ErrorKind::DomainMismatch, "reshaped source");
}

std::size_t ReshapedSource::draw(Rng& rng) {
  record(1);
  return reshape_sample(base_.draw(rng), plan_, rng);
}

CountVector ReshapedSource::draw_counts(std::int64_t m, Rng& rng) {
  CountVector c = reshape_counts(base_.draw_counts(m, rng), plan_, rng);
  record(c.total());
  return c;
}

CountVector ReshapedSource::draw_poisson(double s, Rng& rng) {
  CountVector c = reshape_counts(base_.draw_poisson(s, rng), plan_, rng);
  record(c.total());
  return c;
}

}  // namespace mixtest
