#pragma once

#include <cstdint>
#include <random>

namespace mixtest {

/// splitmix64 finalizer; also used to derive independent child seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for child stream `stream` of `seed`. Depends only on the two inputs.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Seeded generator. Satisfies UniformRandomBitGenerator so std
/// distributions can consume it.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return engine_(); }

  std::uint64_t seed() const { return seed_; }

  /// Child generator for stream `stream`; does not advance this one.
  Rng child(std::uint64_t stream) const { return Rng(derive_seed(seed_, stream)); }

  double uniform();                            ///< [0, 1)
  std::uint64_t below(std::uint64_t bound);    ///< [0, bound), bound > 0
  std::int64_t poisson(double mean);
  std::int64_t binomial(std::int64_t trials, double p);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace mixtest
