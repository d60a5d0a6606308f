#pragma once

#include <cstddef>
#include <cstdint>

#include "mixtest/distribution.hpp"

namespace mixtest {

/// Sample access to an unknown distribution. Testers see only this.
/// Every draw made through a source is counted in samples_drawn().
class SampleSource {
 public:
  virtual ~SampleSource() = default;

  virtual std::size_t domain_size() const = 0;
  virtual std::size_t draw(Rng& rng) = 0;
  /// Counts of exactly m draws.
  virtual CountVector draw_counts(std::int64_t m, Rng& rng) = 0;
  /// Counts of Poi(s) draws; per-element counts are independent Poissons.
  virtual CountVector draw_poisson(double s, Rng& rng) = 0;

  std::int64_t samples_drawn() const { return drawn_; }

 protected:
  void record(std::int64_t m) { drawn_ += m; }

 private:
  std::int64_t drawn_ = 0;
};

/// Backed by an explicit pmf; used by simulations and the harness.
class DistributionSource final : public SampleSource {
 public:
  explicit DistributionSource(Distribution d);

  const Distribution& distribution() const { return dist_; }
  std::size_t domain_size() const override { return dist_.size(); }
  std::size_t draw(Rng& rng) override;
  CountVector draw_counts(std::int64_t m, Rng& rng) override;
  CountVector draw_poisson(double s, Rng& rng) override;

 private:
  Distribution dist_;
  AliasTable alias_;
};

/// (1−α)·first + α·second, realized by an α-biased coin per sample that
/// picks which stream to draw from. Draws are charged to the wrapped sources.
class MixtureSource final : public SampleSource {
 public:
  MixtureSource(SampleSource& first, SampleSource& second, double alpha);

  std::size_t domain_size() const override { return first_.domain_size(); }
  std::size_t draw(Rng& rng) override;
  CountVector draw_counts(std::int64_t m, Rng& rng) override;
  CountVector draw_poisson(double s, Rng& rng) override;

 private:
  SampleSource& first_;
  SampleSource& second_;
  double alpha_;
};

}  // namespace mixtest
