#include "mixtest/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mixtest/errors.hpp"

namespace mixtest {

namespace {

long double sum_of(std::span<const double> v) {
  long double s = 0.0L;
  for (double x : v) s += x;
  return s;
}

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    fail(ErrorKind::DomainMismatch,
         std::string(what) + ": " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

}  // namespace

//==============================================================================
// Distribution
//==============================================================================

Distribution::Distribution(std::vector<double> pmf) : pmf_(std::move(pmf)) {
  if (pmf_.empty()) fail(ErrorKind::EmptyDomain, "distribution needs n >= 1");
  for (double x : pmf_) {
    if (!(x >= 0.0) || !std::isfinite(x)) fail(ErrorKind::NegativeWeight, "pmf entry " + std::to_string(x));
  }
  const long double total = sum_of(pmf_);
  if (std::fabs(static_cast<double>(total - 1.0L)) > kNormalizationTolerance) {
    fail(ErrorKind::NotNormalized, "pmf sums to " + std::to_string(static_cast<double>(total)));
  }
  for (double& x : pmf_) x = static_cast<double>(x / total);
}

Distribution Distribution::uniform(std::size_t n) {
  if (n == 0) fail(ErrorKind::EmptyDomain, "uniform over empty domain");
  return Distribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

double Distribution::mass(std::span<const std::size_t> cell) const {
  long double m = 0.0L;
  for (std::size_t x : cell) {
    if (x >= pmf_.size()) fail(ErrorKind::IndexOutOfRange, "element " + std::to_string(x));
    m += pmf_[x];
  }
  return static_cast<double>(m);
}

Distribution make_distribution(std::span<const double> weights) {
  if (weights.empty()) fail(ErrorKind::EmptyDomain, "no weights");
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) fail(ErrorKind::NegativeWeight, "weight " + std::to_string(w));
  }
  const long double total = sum_of(weights);
  if (total <= 0.0L) fail(ErrorKind::ZeroMass, "weights sum to zero");
  std::vector<double> pmf(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) pmf[i] = static_cast<double>(weights[i] / total);
  return Distribution(std::move(pmf));
}

Distribution empirical(const CountVector& counts) {
  if (counts.total() <= 0) fail(ErrorKind::EmptyCounts, "no samples");
  std::vector<double> pmf(counts.size());
  const double total = static_cast<double>(counts.total());
  for (std::size_t i = 0; i < counts.size(); ++i) pmf[i] = static_cast<double>(counts[i]) / total;
  return Distribution(std::move(pmf));
}

//==============================================================================
// CountVector, MixtureCandidate, Partition
//==============================================================================

CountVector::CountVector(std::vector<std::int64_t> counts, double nominal_s)
    : counts_(std::move(counts)), nominal_s_(nominal_s) {
  for (std::int64_t c : counts_) {
    if (c < 0) fail(ErrorKind::InvalidArgument, "negative count");
    total_ += c;
  }
}

CountVector CountVector::restricted(std::span<const std::size_t> cell) const {
  std::vector<std::int64_t> out;
  out.reserve(cell.size());
  std::int64_t total = 0;
  for (std::size_t x : cell) {
    if (x >= counts_.size()) fail(ErrorKind::IndexOutOfRange, "element " + std::to_string(x));
    out.push_back(counts_[x]);
    total += counts_[x];
  }
  return CountVector(std::move(out), static_cast<double>(total));
}

CountVector operator+(const CountVector& a, const CountVector& b) {
  require_same_size(a.size(), b.size(), "count sum");
  std::vector<std::int64_t> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return CountVector(std::move(out), a.nominal_s() + b.nominal_s());
}

MixtureCandidate::MixtureCandidate(double alpha) : alpha_(alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail(ErrorKind::InvalidAlpha, std::to_string(alpha));
}

Partition::Partition(std::size_t n, std::vector<std::vector<std::size_t>> cells)
    : n_(n), cells_(std::move(cells)) {
  std::vector<char> seen(n, 0);
  std::size_t covered = 0;
  for (const auto& cell : cells_) {
    if (cell.empty()) fail(ErrorKind::EmptyCell, "partition cell");
    for (std::size_t x : cell) {
      if (x >= n) fail(ErrorKind::IndexOutOfRange, "element " + std::to_string(x));
      if (seen[x]) fail(ErrorKind::OverlappingCells, "element " + std::to_string(x));
      seen[x] = 1;
      ++covered;
    }
  }
  cover_all_ = covered == n;
}

Partition Partition::singletons(std::size_t n) {
  std::vector<std::vector<std::size_t>> cells(n);
  for (std::size_t i = 0; i < n; ++i) cells[i] = {i};
  return Partition(n, std::move(cells));
}

//==============================================================================
// Operations
//==============================================================================

Distribution mix(const Distribution& q1, const Distribution& q2, MixtureCandidate alpha) {
  require_same_size(q1.size(), q2.size(), "mix");
  const double a = alpha.alpha();
  std::vector<double> pmf(q1.size());
  for (std::size_t i = 0; i < pmf.size(); ++i) pmf[i] = (1.0 - a) * q1[i] + a * q2[i];
  return Distribution(std::move(pmf));
}

CountVector sample(const Distribution& d, std::int64_t count, Rng& rng) {
  if (count < 0) fail(ErrorKind::InvalidArgument, "negative sample count");
  const std::size_t n = d.size();
  std::vector<long double> suffix(n + 1, 0.0L);
  for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + d[i];
  std::vector<std::int64_t> counts(n, 0);
  std::int64_t left = count;
  for (std::size_t i = 0; i < n && left > 0; ++i) {
    if (d[i] <= 0.0) continue;
    const double p = static_cast<double>(d[i] / suffix[i]);
    const std::int64_t c = (p >= 1.0 || i + 1 == n) ? left : rng.binomial(left, p);
    counts[i] = c;
    left -= c;
  }
  if (left > 0) {
    // Only reachable through rounding when the tail mass is ~0; park the
    // leftovers on the last supported element.
    for (std::size_t i = n; i-- > 0;) {
      if (d[i] > 0.0) {
        counts[i] += left;
        break;
      }
    }
  }
  return CountVector(std::move(counts), static_cast<double>(count));
}

CountVector poisson_sample(const Distribution& d, double s, Rng& rng) {
  if (!(s > 0.0) || !std::isfinite(s)) fail(ErrorKind::InvalidArgument, "Poisson budget must be > 0");
  std::vector<std::int64_t> counts(d.size());
  for (;;) {
    long double total = 0.0L;
    for (std::size_t i = 0; i < d.size(); ++i) {
      counts[i] = rng.poisson(s * d[i]);
      total += counts[i];
    }
    if (total <= 100.0L * s) break;
  }
  return CountVector(std::move(counts), s);
}

double lp_distance(const Distribution& p, const Distribution& q, LpOrder order) {
  require_same_size(p.size(), q.size(), "lp_distance");
  long double acc = 0.0L;
  switch (order) {
    case LpOrder::L1:
      for (std::size_t i = 0; i < p.size(); ++i) acc += std::fabs(p[i] - q[i]);
      return static_cast<double>(acc);
    case LpOrder::L2:
      for (std::size_t i = 0; i < p.size(); ++i) {
        const long double d = p[i] - q[i];
        acc += d * d;
      }
      return static_cast<double>(std::sqrt(acc));
    case LpOrder::L4:
      for (std::size_t i = 0; i < p.size(); ++i) {
        const long double d = p[i] - q[i];
        acc += d * d * d * d;
      }
      return static_cast<double>(std::sqrt(std::sqrt(acc)));
  }
  fail(ErrorKind::InvalidArgument, "unsupported lp order");
}

double l2_distance_sq(const Distribution& p, const Distribution& q) {
  require_same_size(p.size(), q.size(), "l2_distance_sq");
  long double acc = 0.0L;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const long double d = p[i] - q[i];
    acc += d * d;
  }
  return static_cast<double>(acc);
}

Distribution coarsen(const Distribution& p, const Partition& part) {
  require_same_size(p.size(), part.domain_size(), "coarsen");
  if (!part.cover_all()) fail(ErrorKind::IncompletePartition, "coarsening needs a full cover");
  std::vector<double> masses;
  masses.reserve(part.cells().size());
  for (const auto& cell : part.cells()) masses.push_back(p.mass(cell));
  return Distribution(std::move(masses));
}

std::optional<Distribution> restrict_to(const Distribution& p, std::span<const std::size_t> cell) {
  if (cell.empty()) fail(ErrorKind::EmptyCell, "restriction to empty cell");
  const double m = p.mass(cell);
  if (m <= 0.0) return std::nullopt;
  std::vector<double> pmf;
  pmf.reserve(cell.size());
  for (std::size_t x : cell) pmf.push_back(p[x] / m);
  return make_distribution(pmf);
}

double restricted_l1(const Distribution& p, const Distribution& q, std::span<const std::size_t> cell) {
  require_same_size(p.size(), q.size(), "restricted_l1");
  if (cell.empty()) fail(ErrorKind::EmptyCell, "restriction to empty cell");
  const double pm = p.mass(cell);
  const double qm = q.mass(cell);
  if (pm <= 0.0 || qm <= 0.0) return 0.0;
  long double acc = 0.0L;
  for (std::size_t x : cell) acc += std::fabs(p[x] / pm - q[x] / qm);
  return static_cast<double>(acc);
}

double l1_to_mixture(const Distribution& p, const Distribution& q1, const Distribution& q2,
                     double alpha) {
  require_same_size(p.size(), q1.size(), "l1_to_mixture");
  require_same_size(p.size(), q2.size(), "l1_to_mixture");
  long double acc = 0.0L;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += std::fabs(p[i] - ((1.0 - alpha) * q1[i] + alpha * q2[i]));
  }
  return static_cast<double>(acc);
}

FamilyDistance distance_to_mixture_family(const Distribution& p, const Distribution& q1,
                                          const Distribution& q2) {
  require_same_size(p.size(), q1.size(), "distance_to_mixture_family");
  require_same_size(p.size(), q2.size(), "distance_to_mixture_family");
  // g(α) = Σ |c_i + α d_i| with c = p − q1, d = q1 − q2: convex, piecewise
  // linear, kinks at −c_i/d_i. Sweep the kinks in (0,1) until the slope
  // turns nonnegative; the value is then recomputed directly.
  const std::size_t n = p.size();
  long double slope = 0.0L;
  std::vector<std::pair<double, double>> kinks;  // (position, |d_i|)
  for (std::size_t i = 0; i < n; ++i) {
    const double c = p[i] - q1[i];
    const double d = q1[i] - q2[i];
    if (d == 0.0) continue;
    const double sign = c > 0.0 ? 1.0 : (c < 0.0 ? -1.0 : (d > 0.0 ? 1.0 : -1.0));
    slope += sign * d;
    const double at = -c / d;
    if (at > 0.0 && at < 1.0) kinks.emplace_back(at, std::fabs(d));
  }
  double best = 0.0;
  if (slope < 0.0L) {
    std::sort(kinks.begin(), kinks.end());
    best = 1.0;
    for (const auto& [at, weight] : kinks) {
      slope += 2.0L * weight;
      if (slope >= 0.0L) {
        best = at;
        break;
      }
    }
  }
  // Guard the sweep against rounding by also checking the endpoints.
  double value = l1_to_mixture(p, q1, q2, best);
  for (double end : {0.0, 1.0}) {
    const double v = l1_to_mixture(p, q1, q2, end);
    if (v < value) {
      value = v;
      best = end;
    }
  }
  return {value, MixtureCandidate(best)};
}

//==============================================================================
// AliasTable
//==============================================================================

AliasTable::AliasTable(const Distribution& d) : prob_(d.size()), alias_(d.size()) {
  const std::size_t n = d.size();
  std::vector<double> scaled(n);
  std::vector<std::size_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = d[i] * static_cast<double>(n);
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    const std::size_t s = small.back();
    small.pop_back();
    const std::size_t l = large.back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (std::size_t i : large) prob_[i] = 1.0, alias_[i] = i;
  for (std::size_t i : small) prob_[i] = 1.0, alias_[i] = i;
}

std::size_t AliasTable::draw(Rng& rng) const {
  const std::size_t column = rng.below(prob_.size());
  return rng.uniform() < prob_[column] ? column : alias_[column];
}

}  // namespace mixtest
