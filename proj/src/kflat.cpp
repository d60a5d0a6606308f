#include "mixtest/kflat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <string>

#include "mixtest/errors.hpp"

namespace mixtest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_eps_prime(double eps_prime) {
  if (!(eps_prime > 0.0 && eps_prime < 1.0)) fail(ErrorKind::InvalidEpsilon, "eps' must lie in (0,1)");
}

}  // namespace

//==============================================================================
// Bucketing
//==============================================================================

double Bucketing::low_cut() const { return eps_prime * eps_prime / static_cast<double>(n); }

double Bucketing::band_floor(int band) const { return std::pow(1.0 + eps_prime, band) * low_cut(); }

Bucketing bucket(const Distribution& q, double eps_prime) {
  require_eps_prime(eps_prime);
  Bucketing b;
  b.n = q.size();
  b.eps_prime = eps_prime;
  const double cut = b.low_cut();
  const double step = std::log1p(eps_prime);
  std::vector<std::size_t> low;
  std::map<int, std::vector<std::size_t>> bands;
  for (std::size_t x = 0; x < b.n; ++x) {
    if (q[x] <= cut) {
      low.push_back(x);
      continue;
    }
    int j = static_cast<int>(std::floor(std::log(q[x] / cut) / step));
    j = std::max(j, 0);
    while (j > 0 && q[x] <= b.band_floor(j)) --j;
    while (q[x] > b.band_floor(j + 1)) ++j;
    bands[j].push_back(x);
  }
  b.bucket_of.assign(b.n, 0);
  if (!low.empty()) b.buckets.push_back(Bucket{true, -1, std::move(low)});
  for (auto& [band, elems] : bands) b.buckets.push_back(Bucket{false, band, std::move(elems)});
  for (std::size_t j = 0; j < b.buckets.size(); ++j) {
    for (std::size_t x : b.buckets[j].elements) b.bucket_of[x] = j;
  }
  return b;
}

//==============================================================================
// Segmentations and divisions
//==============================================================================

Segmentation::Segmentation(std::size_t n, std::vector<Interval> intervals)
    : n_(n), intervals_(std::move(intervals)) {
  if (intervals_.empty()) fail(ErrorKind::InvalidArgument, "segmentation needs an interval");
  std::size_t at = 0;
  for (const Interval& iv : intervals_) {
    if (iv.begin != at || iv.end <= iv.begin) fail(ErrorKind::InvalidArgument, "segmentation intervals");
    at = iv.end;
  }
  if (at != n) fail(ErrorKind::InvalidArgument, "segmentation must cover the domain");
}

Segmentation Segmentation::from_cuts(std::size_t n, const std::vector<std::size_t>& cuts) {
  std::vector<Interval> out;
  std::size_t at = 0;
  for (std::size_t c : cuts) {
    out.push_back({at, c});
    at = c;
  }
  out.push_back({at, n});
  return Segmentation(n, std::move(out));
}

std::size_t Segmentation::interval_of(std::size_t x) const {
  if (x >= n_) fail(ErrorKind::IndexOutOfRange, "element " + std::to_string(x));
  auto it = std::upper_bound(intervals_.begin(), intervals_.end(), x,
                             [](std::size_t v, const Interval& iv) { return v < iv.end; });
  return static_cast<std::size_t>(it - intervals_.begin());
}

Partition Division::partition(std::size_t n) const {
  std::vector<std::vector<std::size_t>> out;
  out.reserve(cells.size());
  for (const DivisionCell& c : cells) out.push_back(c.elements);
  return Partition(n, std::move(out));
}

std::size_t refined_cap(std::size_t n, std::size_t t) { return (n + t - 1) / t; }

void for_each_interval_cell(
    const Bucketing& b, std::size_t lo, std::size_t hi, std::size_t t,
    const std::function<void(std::size_t, std::size_t, std::span<const std::size_t>)>& visit) {
  const std::size_t cap = t > 0 ? refined_cap(b.n, t) : 0;
  for (std::size_t j = 0; j < b.buckets.size(); ++j) {
    const auto& elems = b.buckets[j].elements;
    const auto first = std::lower_bound(elems.begin(), elems.end(), lo);
    const auto last = std::lower_bound(first, elems.end(), hi);
    const std::size_t z = static_cast<std::size_t>(last - first);
    if (z == 0) continue;
    std::size_t parts = 1;
    if (t > 0 && z > cap) parts = std::min(z, z * t / b.n + 1);
    const std::size_t base = z / parts;
    const std::size_t extra = z % parts;
    const std::size_t* at = &*first;
    for (std::size_t part = 0; part < parts; ++part) {
      const std::size_t len = base + (part < extra ? 1 : 0);
      visit(j, part, std::span<const std::size_t>(at, len));
      at += len;
    }
  }
}

Division build_division(const Segmentation& seg, const Bucketing& b, bool refine) {
  if (seg.domain_size() != b.n) fail(ErrorKind::DomainMismatch, "division inputs");
  Division d;
  d.t = seg.k() * b.v();
  d.refined = refine;
  const auto& ivs = seg.intervals();
  for (std::size_t i = 0; i < ivs.size(); ++i) {
    for_each_interval_cell(b, ivs[i].begin, ivs[i].end, refine ? d.t : 0,
                           [&](std::size_t j, std::size_t part, std::span<const std::size_t> e) {
                             d.cells.push_back(DivisionCell{i, j, part, {e.begin(), e.end()}});
                           });
  }
  return d;
}

//==============================================================================
// Statistics
//==============================================================================

Verdict uniformity_subtest(const CountVector& cell_counts, double eps_prime, double c_unif) {
  require_eps_prime(eps_prime);
  const std::size_t m = cell_counts.size();
  if (m == 0) fail(ErrorKind::EmptyCell, "uniformity subtest");
  const double md = static_cast<double>(m);
  Verdict v;
  v.threshold = 1.5 * eps_prime * eps_prime / md;
  v.details["m"] = md;
  if (m == 1) {
    v.accepted = true;
    return v;
  }
  const std::int64_t s = cell_counts.total();
  const double need = c_unif * std::sqrt(md) / (eps_prime * eps_prime);
  if (static_cast<double>(s) < need || s < 2) fail(ErrorKind::InsufficientSamples, "uniformity subtest");
  long double collisions = 0.0L;
  for (std::int64_t c : cell_counts.counts()) {
    collisions += static_cast<long double>(c) * static_cast<long double>(c - 1);
  }
  const long double pairs = static_cast<long double>(s) * static_cast<long double>(s - 1);
  v.statistic = static_cast<double>(collisions / pairs) - 1.0 / md;
  v.accepted = v.statistic <= v.threshold;
  v.details["samples"] = static_cast<double>(s);
  return v;
}

Distribution coarsened_empirical(const CountVector& p_counts, const Division& div) {
  if (p_counts.total() <= 0) fail(ErrorKind::EmptyCounts, "coarsened empirical");
  return coarsen(empirical(p_counts), div.partition(p_counts.size()));
}

//==============================================================================
// Fitting
//==============================================================================

std::vector<double> alpha_grid(double eps_prime) {
  require_eps_prime(eps_prime);
  const double step = eps_prime / 2.0;
  std::vector<double> out;
  for (std::size_t i = 0;; ++i) {
    const double a = static_cast<double>(i) * step;
    if (a >= 1.0 - 1e-12) break;
    out.push_back(a);
  }
  out.push_back(1.0);
  return out;
}

namespace {

struct CellMass {
  double p;
  double q;
  double size;
};

// Least Σ |p − (1−α)q − α c size| over c ≥ 0: a weighted median of the
// per-cell ratios, clamped at 0.
double level_cost(std::span<const CellMass> cells, double alpha, double& level) {
  long double cost = 0.0L;
  if (alpha == 0.0) {
    level = 0.0;
    for (const CellMass& c : cells) cost += std::fabs(c.p - c.q);
    return static_cast<double>(cost);
  }
  std::vector<std::pair<double, double>> ratio;  // (r, weight)
  ratio.reserve(cells.size());
  double total = 0.0;
  for (const CellMass& c : cells) {
    const double w = alpha * c.size;
    ratio.emplace_back((c.p - (1.0 - alpha) * c.q) / w, w);
    total += w;
  }
  std::sort(ratio.begin(), ratio.end());
  double acc = 0.0;
  double median = ratio.back().first;
  for (const auto& [r, w] : ratio) {
    acc += w;
    if (acc >= total / 2.0) {
      median = r;
      break;
    }
  }
  level = std::max(median, 0.0);
  for (const CellMass& c : cells) cost += std::fabs(c.p - (1.0 - alpha) * c.q - alpha * level * c.size);
  return static_cast<double>(cost);
}

// Costs and levels for every interval [lo, hi), indexed lo * (n + 1) + hi.
struct CostTable {
  std::size_t n;
  std::vector<double> cost;
  std::vector<double> level;
  std::size_t id(std::size_t lo, std::size_t hi) const { return lo * (n + 1) + hi; }
};

KFlatSearch run_dp(std::size_t n, std::size_t k, const std::vector<double>& grid, double threshold,
                   const std::function<void(double, CostTable&)>& fill) {
  KFlatSearch out{std::nullopt, kInf};
  CostTable table{n, std::vector<double>((n + 1) * (n + 1), kInf), std::vector<double>((n + 1) * (n + 1), 0.0)};
  std::vector<double> d((k + 1) * (n + 1));
  std::vector<std::size_t> from((k + 1) * (n + 1));
  auto at = [n](std::size_t j, std::size_t i) { return j * (n + 1) + i; };
  for (double alpha : grid) {
    fill(alpha, table);
    std::fill(d.begin(), d.end(), kInf);
    d[at(0, 0)] = 0.0;
    for (std::size_t j = 1; j <= k; ++j) {
      for (std::size_t i = j; i <= n; ++i) {
        double best = kInf;
        std::size_t arg = 0;
        for (std::size_t prev = j - 1; prev < i; ++prev) {
          const double base = d[at(j - 1, prev)];
          const double c = table.cost[table.id(prev, i)];
          if (base == kInf || c == kInf) continue;
          const double cand = base + c;
          if (cand < best) {
            best = cand;
            arg = prev;
          }
        }
        d[at(j, i)] = best;
        from[at(j, i)] = arg;
      }
    }
    const double gap = d[at(k, n)];
    out.best_gap = std::min(out.best_gap, gap);
    if (!out.fit && gap <= threshold) {
      std::vector<Interval> ivs(k);
      std::vector<double> levels(k);
      std::size_t i = n;
      for (std::size_t j = k; j >= 1; --j) {
        const std::size_t prev = from[at(j, i)];
        ivs[j - 1] = {prev, i};
        levels[j - 1] = table.level[table.id(prev, i)];
        i = prev;
      }
      out.fit = KFlatFit{MixtureCandidate(alpha), std::move(levels), Segmentation(n, std::move(ivs)), gap};
    }
  }
  return out;
}

void require_k(std::size_t k, std::size_t n) {
  if (k < 1 || k > n) fail(ErrorKind::InvalidK, "k must lie in [1, n]");
}

}  // namespace

KFlatSearch search_kflat(const Distribution& p_hat, const Distribution& q, const Bucketing& b,
                         std::size_t k, double eps_prime, const CellVerdicts& passes, double threshold) {
  const std::size_t n = q.size();
  if (p_hat.size() != n || b.n != n) fail(ErrorKind::DomainMismatch, "k-flat fit inputs");
  require_k(k, n);
  const std::size_t t = k * b.v();

  // Interval cells and verdicts do not depend on α; collect them once.
  std::vector<std::size_t> start((n + 1) * (n + 1) + 1, 0);
  std::vector<char> ok((n + 1) * (n + 1), 0);
  std::vector<CellMass> cells;
  for (std::size_t lo = 0; lo < n; ++lo) {
    for (std::size_t hi = lo + 1; hi <= n; ++hi) {
      const std::size_t id = lo * (n + 1) + hi;
      start[id] = cells.size();
      bool fine = true;
      for_each_interval_cell(b, lo, hi, t, [&](std::size_t j, std::size_t, std::span<const std::size_t> e) {
        cells.push_back({p_hat.mass(e), q.mass(e), static_cast<double>(e.size())});
        if (fine && !b.buckets[j].low && !passes(j, e)) fine = false;
      });
      ok[id] = fine ? 1 : 0;
      start[id + 1] = cells.size();
    }
  }
  auto span_of = [&](std::size_t id) {
    return std::span<const CellMass>(cells.data() + start[id], start[id + 1] - start[id]);
  };
  return run_dp(n, k, alpha_grid(eps_prime), threshold, [&](double alpha, CostTable& table) {
    for (std::size_t lo = 0; lo < n; ++lo) {
      for (std::size_t hi = lo + 1; hi <= n; ++hi) {
        const std::size_t id = table.id(lo, hi);
        if (!ok[id]) {
          table.cost[id] = kInf;
          continue;
        }
        table.cost[id] = level_cost(span_of(id), alpha, table.level[id]);
      }
    }
  });
}

std::optional<KFlatFit> fit_kflat_dp(const Distribution& p_hat, const Distribution& q, const Bucketing& b,
                                     std::size_t k, double eps_prime, const CellVerdicts& passes) {
  return search_kflat(p_hat, q, b, k, eps_prime, passes, 2.0 * eps_prime).fit;
}

KFlatSearch search_kflat_elementwise(const Distribution& p_hat, const Distribution& q, std::size_t k,
                                     double eps_prime, double threshold) {
  const std::size_t n = q.size();
  if (p_hat.size() != n) fail(ErrorKind::DomainMismatch, "k-flat fit inputs");
  require_k(k, n);
  return run_dp(n, k, alpha_grid(eps_prime), threshold, [&](double alpha, CostTable& table) {
    // Growing each interval to the right, a two-heap running median of
    // u_x = (p̂(x) − (1−α) q(x)) / α gives the optimal level in O(log n).
    for (std::size_t lo = 0; lo < n; ++lo) {
      std::priority_queue<double> lower;
      std::priority_queue<double, std::vector<double>, std::greater<>> upper;
      long double sum_lower = 0.0L, sum_upper = 0.0L, sum_abs = 0.0L;
      for (std::size_t hi = lo + 1; hi <= n; ++hi) {
        const std::size_t x = hi - 1;
        const double r = p_hat[x] - (1.0 - alpha) * q[x];
        const std::size_t id = table.id(lo, hi);
        if (alpha == 0.0) {
          sum_abs += std::fabs(r);
          table.cost[id] = static_cast<double>(sum_abs);
          table.level[id] = 0.0;
          continue;
        }
        const double u = r / alpha;
        sum_abs += std::fabs(r);
        if (lower.empty() || u <= lower.top()) {
          lower.push(u);
          sum_lower += u;
        } else {
          upper.push(u);
          sum_upper += u;
        }
        if (lower.size() > upper.size() + 1) {
          sum_lower -= lower.top();
          sum_upper += lower.top();
          upper.push(lower.top());
          lower.pop();
        } else if (upper.size() > lower.size()) {
          sum_upper -= upper.top();
          sum_lower += upper.top();
          lower.push(upper.top());
          upper.pop();
        }
        const double median = lower.top();
        if (median <= 0.0) {
          table.level[id] = 0.0;
          table.cost[id] = static_cast<double>(sum_abs);
        } else {
          table.level[id] = median;
          const long double spread = (sum_upper - median * static_cast<long double>(upper.size())) +
                                     (median * static_cast<long double>(lower.size()) - sum_lower);
          table.cost[id] = static_cast<double>(alpha * spread);
        }
      }
    }
  });
}

Distribution normalize_kflat(const KFlatFit& fit) {
  const Segmentation& seg = fit.segmentation;
  const std::size_t n = seg.domain_size();
  if (fit.levels.size() != seg.k()) fail(ErrorKind::InvalidArgument, "one level per interval");
  long double mass = 0.0L;
  for (std::size_t j = 0; j < seg.k(); ++j) {
    if (fit.levels[j] < 0.0) fail(ErrorKind::NegativeWeight, "k-flat level");
    mass += fit.levels[j] * static_cast<long double>(seg.intervals()[j].size());
  }
  if (mass <= 0.0L) return Distribution::uniform(n);
  std::vector<double> w(n);
  for (std::size_t j = 0; j < seg.k(); ++j) {
    for (std::size_t x = seg.intervals()[j].begin; x < seg.intervals()[j].end; ++x) w[x] = fit.levels[j];
  }
  return make_distribution(w);
}

//==============================================================================
// Tester
//==============================================================================

KFlatBudget kflat_budget(const Bucketing& b, const KFlatConfig& cfg) {
  const double nd = static_cast<double>(b.n);
  const double e = b.eps_prime;
  KFlatBudget out;
  out.v = b.v();
  out.t = cfg.k * out.v;
  if (out.t > b.n) {
    out.fallback = true;
    out.samples = static_cast<std::int64_t>(std::ceil(cfg.c_fallback * nd / (cfg.eps * cfg.eps)));
    return out;
  }
  if (cfg.repeats > 0) {
    out.repeats = cfg.repeats;
  } else {
    const int r = static_cast<int>(std::ceil(std::log(nd * nd * static_cast<double>(out.v))));
    out.repeats = std::max(1, r % 2 == 0 ? r + 1 : r);
  }
  const double td = static_cast<double>(out.t);
  const double cap = static_cast<double>(refined_cap(b.n, out.t));
  const double per_run = cfg.c_unif * std::sqrt(cap) / (e * e);
  const double uniformity = out.repeats * cfg.budget_slack * per_run * 4.0 * td / e;
  const double coarse = cfg.c_emp * std::min(nd, td * std::max(1.0, std::log(nd))) / (e * e);
  out.samples = static_cast<std::int64_t>(std::ceil(std::max(uniformity, coarse)));
  out.gate = e * static_cast<double>(out.samples) / (4.0 * td);
  return out;
}

Verdict kflat_identity_test(const Distribution& q, const KFlatConfig& cfg, SampleSource& p_source, Rng& rng) {
  if (!(cfg.eps > 0.0 && cfg.eps < 2.0)) fail(ErrorKind::InvalidEpsilon, "k-flat eps");
  const std::size_t n = q.size();
  if (p_source.domain_size() != n) fail(ErrorKind::DomainMismatch, "k-flat inputs");
  require_k(cfg.k, n);
  if (cfg.repeats < 0 || (cfg.repeats > 0 && cfg.repeats % 2 == 0)) {
    fail(ErrorKind::InvalidArgument, "repeats must be odd");
  }
  const double eps_prime = cfg.eps / 14.0;
  const Bucketing b = bucket(q, eps_prime);
  const KFlatBudget budget = kflat_budget(b, cfg);
  const std::int64_t before = p_source.samples_drawn();

  Verdict v;
  KFlatSearch search{std::nullopt, kInf};
  if (budget.fallback) {
    const CountVector counts = p_source.draw_counts(budget.samples, rng);
    v.threshold = cfg.eps / 4.0;
    search = search_kflat_elementwise(empirical(counts), q, cfg.k, eps_prime, v.threshold);
  } else {
    // One draw of s samples, kept as `repeats` disjoint groups so each
    // uniformity vote sees independent samples.
    std::vector<CountVector> groups;
    const std::int64_t R = budget.repeats;
    for (std::int64_t r = 0; r < R; ++r) {
      const std::int64_t size = budget.samples / R + (r < budget.samples % R ? 1 : 0);
      groups.push_back(p_source.draw_counts(size, rng));
    }
    CountVector pooled = groups.front();
    for (std::size_t r = 1; r < groups.size(); ++r) pooled = pooled + groups[r];
    CellVerdicts passes = [&](std::size_t, std::span<const std::size_t> cell) {
      if (cell.size() <= 1) return true;
      std::int64_t mass = 0;
      for (std::size_t x : cell) mass += pooled[x];
      if (static_cast<double>(mass) < budget.gate) return true;
      const double need = cfg.c_unif * std::sqrt(static_cast<double>(cell.size())) / (eps_prime * eps_prime);
      int votes = 0, rejects = 0;
      for (const CountVector& g : groups) {
        const CountVector local = g.restricted(cell);
        if (static_cast<double>(local.total()) < need) continue;
        ++votes;
        if (!uniformity_subtest(local, eps_prime, cfg.c_unif).accepted) ++rejects;
      }
      return 2 * rejects <= votes;
    };
    v.threshold = 2.0 * eps_prime;
    search = search_kflat(empirical(pooled), q, b, cfg.k, eps_prime, passes, v.threshold);
  }
  v.statistic = search.best_gap;
  v.accepted = search.fit.has_value();
  v.samples_used = p_source.samples_drawn() - before;
  v.details["v"] = static_cast<double>(budget.v);
  v.details["t"] = static_cast<double>(budget.t);
  v.details["fallback"] = budget.fallback ? 1.0 : 0.0;
  v.details["repeats"] = budget.repeats;
  if (search.fit) {
    v.details["alpha"] = search.fit->alpha.alpha();
    v.candidates = {search.fit->alpha.alpha()};
  }
  return v;
}

}  // namespace mixtest
