#include "mixtest/trials.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <thread>
#include <vector>

#include "mixtest/errors.hpp"
#include "mixtest/io.hpp"
#include "mixtest/sources.hpp"

namespace mixtest {

TesterKind tester_from_name(const std::string& name) {
  if (name == "identity") return TesterKind::Identity;
  if (name == "closeness") return TesterKind::Closeness;
  if (name == "kflat") return TesterKind::KFlat;
  fail(ErrorKind::UnknownTester, "'" + name + "'");
}

const char* tester_name(TesterKind kind) {
  switch (kind) {
    case TesterKind::Identity: return "identity";
    case TesterKind::Closeness: return "closeness";
    case TesterKind::KFlat: return "kflat";
  }
  return "unknown";
}

InstanceSpec spec_from_json(const nlohmann::json& j, const std::string& base_dir) {
  InstanceSpec s;
  try {
    s.eps = j.value("eps", s.eps);
    s.k = j.value("k", s.k);
    s.repeats = j.value("repeats", s.repeats);
    s.c_sub = j.value("c_sub", s.c_sub);
    s.c_learn = j.value("c_learn", s.c_learn);
    s.c_s = j.value("c_s", s.c_s);
    s.c_est = j.value("c_est", s.c_est);
    s.accept_factor = j.value("accept_factor", s.accept_factor);
    s.c_unif = j.value("c_unif", s.c_unif);
    auto read = [&](const char* key, std::optional<Distribution>& into) {
      if (!j.contains(key)) return;
      const auto& v = j.at(key);
      if (v.is_string()) {
        std::filesystem::path ref(v.get<std::string>());
        if (ref.is_relative()) ref = std::filesystem::path(base_dir) / ref;
        into = load_distribution(ref.string());
      } else {
        into = distribution_from_json(v);
      }
    };
    read("p", s.p);
    read("q1", s.q1);
    read("q2", s.q2);
    read("q", s.q);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::BadInput, e.what());
  }
  return s;
}

namespace {

const Distribution& need(const std::optional<Distribution>& d, const char* name) {
  if (!d) fail(ErrorKind::BadInput, std::string("instance lacks ") + name);
  return *d;
}

}  // namespace

Verdict run_once(TesterKind kind, const InstanceSpec& spec, Rng& rng) {
  switch (kind) {
    case TesterKind::Identity: {
      IdentityConfig cfg;
      cfg.eps = spec.eps;
      cfg.c_sub = spec.c_sub;
      cfg.c_learn = spec.c_learn;
      cfg.repeats = spec.repeats;
      DistributionSource p(need(spec.p, "p"));
      return identity_test_known_noise(need(spec.q1, "q1"), need(spec.q2, "q2"), cfg, p, rng);
    }
    case TesterKind::Closeness: {
      DistributionSource p(need(spec.p, "p"));
      DistributionSource q1(need(spec.q1, "q1"));
      DistributionSource q2(need(spec.q2, "q2"));
      ClosenessConfig cfg = make_closeness_config(p.domain_size(), spec.eps, spec.c_s);
      cfg.c_est = spec.c_est;
      cfg.accept_factor = spec.accept_factor;
      return closeness_test(cfg, p, q1, q2, rng);
    }
    case TesterKind::KFlat: {
      KFlatConfig cfg;
      cfg.eps = spec.eps;
      cfg.k = spec.k;
      cfg.c_unif = spec.c_unif;
      DistributionSource p(need(spec.p, "p"));
      return kflat_identity_test(need(spec.q, "q"), cfg, p, rng);
    }
  }
  fail(ErrorKind::UnknownTester, "unreachable");
}

unsigned worker_count(unsigned requested) {
  unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MIXTEST_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min(n, static_cast<unsigned>(cap));
  }
  return n;
}

TrialReport run_trials(const std::string& tester, const InstanceSpec& spec, std::int64_t trials,
                       std::uint64_t seed, unsigned threads) {
  const TesterKind kind = tester_from_name(tester);
  if (trials < 1) fail(ErrorKind::InvalidArgument, "trials must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  std::vector<char> accepted(static_cast<std::size_t>(trials), 0);
  std::vector<std::int64_t> samples(static_cast<std::size_t>(trials), 0);
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (std::int64_t i = next++; i < trials && !failed; i = next++) {
      try {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
        const Verdict v = run_once(kind, spec, rng);
        accepted[static_cast<std::size_t>(i)] = v.accepted ? 1 : 0;
        samples[static_cast<std::size_t>(i)] = v.samples_used;
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    }
  };
  const unsigned workers = std::min<unsigned>(worker_count(threads), static_cast<unsigned>(trials));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);

  TrialReport r;
  r.tester = tester_name(kind);
  r.eps = spec.eps;
  r.k = kind == TesterKind::KFlat ? spec.k : 0;
  r.n = kind == TesterKind::KFlat ? need(spec.q, "q").size() : need(spec.p, "p").size();
  r.trials = trials;
  r.seed = seed;
  std::int64_t acc = 0;
  for (std::size_t i = 0; i < accepted.size(); ++i) {
    acc += accepted[i];
    r.samples_used += samples[i];
  }
  r.accept_rate = static_cast<double>(acc) / static_cast<double>(trials);
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string report_csv_header() { return "tester,n,k,eps,trials,accept_rate,samples_used,wall_time,seed"; }

std::string report_csv_row(const TrialReport& r) {
  std::ostringstream out;
  out.precision(12);
  out << r.tester << ',' << r.n << ',' << r.k << ',' << r.eps << ',' << r.trials << ',' << r.accept_rate << ','
      << r.samples_used << ',' << r.wall_time << ',' << r.seed;
  return out.str();
}

nlohmann::json report_to_json(const TrialReport& r) {
  return {{"tester", r.tester},
          {"n", r.n},
          {"k", r.k},
          {"eps", r.eps},
          {"trials", r.trials},
          {"accept_rate", r.accept_rate},
          {"samples_used", r.samples_used},
          {"wall_time", r.wall_time},
          {"seed", r.seed}};
}

}  // namespace mixtest
