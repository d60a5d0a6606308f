#include "mixtest/sources.hpp"

#include "mixtest/errors.hpp"

namespace mixtest {

DistributionSource::DistributionSource(Distribution d) : dist_(std::move(d)), alias_(dist_) {}

std::size_t DistributionSource::draw(Rng& rng) {
  record(1);
  return alias_.draw(rng);
}

CountVector DistributionSource::draw_counts(std::int64_t m, Rng& rng) {
  CountVector c = sample(dist_, m, rng);
  record(c.total());
  return c;
}

CountVector DistributionSource::draw_poisson(double s, Rng& rng) {
  CountVector c = poisson_sample(dist_, s, rng);
  record(c.total());
  return c;
}

MixtureSource::MixtureSource(SampleSource& first, SampleSource& second, double alpha)
    : first_(first), second_(second), alpha_(MixtureCandidate(alpha).alpha()) {
  if (first.domain_size() != second.domain_size()) fail(ErrorKind::DomainMismatch, "mixture streams");
}

std::size_t MixtureSource::draw(Rng& rng) {
  record(1);
  return rng.uniform() < alpha_ ? second_.draw(rng) : first_.draw(rng);
}

CountVector MixtureSource::draw_counts(std::int64_t m, Rng& rng) {
  const std::int64_t from_second = rng.binomial(m, alpha_);
  record(m);
  const CountVector a = first_.draw_counts(m - from_second, rng);
  const CountVector b = second_.draw_counts(from_second, rng);
  return a + b;
}

CountVector MixtureSource::draw_poisson(double s, Rng& rng) {
  // Thinning a Poi(s) stream by the coin gives independent Poi((1−α)s) and
  // Poi(αs) streams.
  std::vector<std::int64_t> out(domain_size(), 0);
  std::int64_t total = 0;
  auto add = [&](const CountVector& c) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += c[i];
    total += c.total();
  };
  if (alpha_ < 1.0) add(first_.draw_poisson((1.0 - alpha_) * s, rng));
  if (alpha_ > 0.0) add(second_.draw_poisson(alpha_ * s, rng));
  record(total);
  return CountVector(std::move(out), s);
}

}  // namespace mixtest
