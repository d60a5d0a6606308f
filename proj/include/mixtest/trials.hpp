#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "mixtest/closeness.hpp"
#include "mixtest/distribution.hpp"
#include "mixtest/identity.hpp"
#include "mixtest/kflat.hpp"
#include "mixtest/verdict.hpp"

namespace mixtest {

enum class TesterKind { Identity, Closeness, KFlat };

/// "identity", "closeness" or "kflat". Throws UnknownTester.
TesterKind tester_from_name(const std::string& name);
const char* tester_name(TesterKind kind);

/// Everything a tester needs besides randomness. Unused members stay empty.
struct InstanceSpec {
  double eps = 0.1;
  std::size_t k = 1;
  int repeats = 1;
  std::optional<Distribution> p, q1, q2, q;
  double c_sub = 16.0;
  double c_learn = kDefaultLearnerConstant;
  double c_s = kDefaultCandidateConstant;
  double c_est = kDefaultEstimatorConstant;
  double accept_factor = 1.0;
  double c_unif = kDefaultUniformityConstant;
};

/// Keys: eps, k, repeats, the constants above, and p/q1/q2/q given inline as
/// distribution objects or as "path#key" strings. Relative paths resolve
/// against `base_dir`. Throws BadInput.
InstanceSpec spec_from_json(const nlohmann::json& j, const std::string& base_dir = ".");

/// One run on fresh sources built from `spec`. Throws BadInput if the
/// tester's distributions are missing.
Verdict run_once(TesterKind kind, const InstanceSpec& spec, Rng& rng);

struct TrialReport {
  std::string tester;
  std::size_t n = 0;
  std::size_t k = 0;
  double eps = 0.0;
  std::int64_t samples_used = 0;  ///< summed over all trials
  std::int64_t trials = 0;
  double accept_rate = 0.0;
  double wall_time = 0.0;  ///< seconds; the only field that varies between identical runs
  std::uint64_t seed = 0;
};

/// Trial i uses Rng(derive_seed(seed, i)). Runs on worker_count(threads)
/// threads; results are merged by trial index. Throws UnknownTester, InvalidArgument.
TrialReport run_trials(const std::string& tester, const InstanceSpec& spec, std::int64_t trials,
                       std::uint64_t seed, unsigned threads = 0);

/// `requested` if nonzero, else hardware concurrency; capped by MIXTEST_THREADS.
unsigned worker_count(unsigned requested = 0);

/// Column order: tester,n,k,eps,trials,accept_rate,samples_used,wall_time,seed
std::string report_csv_header();
std::string report_csv_row(const TrialReport& r);
nlohmann::json report_to_json(const TrialReport& r);

}  // namespace mixtest
