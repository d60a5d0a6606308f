// mixtest: run a single tester, a Monte-Carlo benchmark, or generate instances.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mixtest/distribution.hpp"
#include "mixtest/errors.hpp"
#include "mixtest/instances.hpp"
#include "mixtest/io.hpp"
#include "mixtest/rng.hpp"
#include "mixtest/sources.hpp"
#include "mixtest/trials.hpp"

using namespace mixtest;
using nlohmann::json;

namespace {

constexpr int kExitAccept = 0;
constexpr int kExitReject = 1;
constexpr int kExitError = 2;

int report(const Verdict& v) {
  std::cout << verdict_to_json(v).dump(2) << '\n';
  return v.accepted ? kExitAccept : kExitReject;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::BadInput, "cannot write " + path);
  out << text;
}

json generate(const std::string& kind, std::size_t n, double eps, double alpha, std::uint64_t seed) {
  Rng rng(seed);
  json bundle = {{"kind", kind}, {"n", n}, {"eps", eps}, {"seed", seed}};
  if (kind == "lb") {
    const LbInstance lb = gen_lb_instance(n, eps);
    bundle["p"] = distribution_to_json(lb.p_star);
    bundle["q1"] = distribution_to_json(lb.q_star);
    bundle["q2"] = distribution_to_json(Distribution::uniform(n));
    bundle["distance"] = lb.distance;
    bundle["in_regime"] = lb.in_regime;
    return bundle;
  }
  const Distribution q1 = random_distribution(n, rng);
  const Distribution q2 = random_distribution(n, rng);
  bundle["q1"] = distribution_to_json(q1);
  bundle["q2"] = distribution_to_json(q2);
  if (kind == "mixture") {
    bundle["alpha"] = alpha;
    bundle["p"] = distribution_to_json(mix(q1, q2, MixtureCandidate(alpha)));
  } else if (kind == "far") {
    const Distribution p = gen_far_instance(q1, q2, eps, rng);
    bundle["p"] = distribution_to_json(p);
    bundle["distance"] = distance_to_mixture_family(p, q1, q2).distance;
  } else {
    fail(ErrorKind::InvalidArgument, "unknown --kind '" + kind + "'");
  }
  return bundle;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Testing against mixtures of known distributions"};
  app.require_subcommand(1);

  std::string p_ref, q1_ref, q2_ref, q_ref;
  double eps = 0.1;
  std::uint64_t seed = 1;
  int repeats = 1;
  std::size_t k = 1;

  auto* identity = app.add_subcommand("identity", "p against mixtures of known q1, q2");
  identity->add_option("--q1", q1_ref)->required();
  identity->add_option("--q2", q2_ref)->required();
  identity->add_option("--p", p_ref, "distribution sampled by the tester")->required();
  identity->add_option("--eps", eps)->required();
  identity->add_option("--seed", seed);
  identity->add_option("--repeats", repeats, "odd number of runs for a majority vote");

  auto* closeness = app.add_subcommand("closeness", "p, q1, q2 all accessed through samples");
  closeness->add_option("--p", p_ref)->required();
  closeness->add_option("--q1", q1_ref)->required();
  closeness->add_option("--q2", q2_ref)->required();
  closeness->add_option("--eps", eps)->required();
  closeness->add_option("--seed", seed);

  auto* kflat = app.add_subcommand("kflat", "p against q mixed with unknown k-flat noise");
  kflat->add_option("--q", q_ref)->required();
  kflat->add_option("--p", p_ref)->required();
  kflat->add_option("--k", k)->required();
  kflat->add_option("--eps", eps)->required();
  kflat->add_option("--seed", seed);

  std::string tester, config, out;
  std::int64_t trials = 100;
  auto* bench = app.add_subcommand("bench", "Monte-Carlo acceptance rate");
  bench->add_option("--tester", tester)->required()->check(CLI::IsMember({"identity", "closeness", "kflat"}));
  bench->add_option("--config", config, "instance JSON")->required()->check(CLI::ExistingFile);
  bench->add_option("--trials", trials)->required();
  bench->add_option("--seed", seed)->required();
  bench->add_option("--out", out, "FILE.csv or FILE.json")->required();

  std::string kind;
  std::size_t n = 0;
  double alpha = 0.5;
  auto* gen = app.add_subcommand("gen", "write an instance bundle {p, q1, q2, eps, ...}");
  gen->add_option("--kind", kind)->required()->check(CLI::IsMember({"lb", "mixture", "far"}));
  gen->add_option("--n", n)->required();
  gen->add_option("--eps", eps)->required();
  gen->add_option("--alpha", alpha);
  gen->add_option("--seed", seed);
  gen->add_option("--out", out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    Rng rng(seed);
    if (*identity) {
      InstanceSpec spec;
      spec.eps = eps;
      spec.repeats = repeats;
      spec.p = load_distribution(p_ref);
      spec.q1 = load_distribution(q1_ref);
      spec.q2 = load_distribution(q2_ref);
      return report(run_once(TesterKind::Identity, spec, rng));
    }
    if (*closeness) {
      InstanceSpec spec;
      spec.eps = eps;
      spec.p = load_distribution(p_ref);
      spec.q1 = load_distribution(q1_ref);
      spec.q2 = load_distribution(q2_ref);
      return report(run_once(TesterKind::Closeness, spec, rng));
    }
    if (*kflat) {
      InstanceSpec spec;
      spec.eps = eps;
      spec.k = k;
      spec.p = load_distribution(p_ref);
      spec.q = load_distribution(q_ref);
      return report(run_once(TesterKind::KFlat, spec, rng));
    }
    if (*bench) {
      std::ifstream in(config);
      json j;
      try {
        j = json::parse(in);
      } catch (const json::exception& e) {
        fail(ErrorKind::BadInput, config + ": " + e.what());
      }
      const std::string base = std::filesystem::path(config).parent_path().string();
      const TrialReport r = run_trials(tester, spec_from_json(j, base.empty() ? "." : base), trials, seed);
      if (std::filesystem::path(out).extension() == ".json") {
        write_file(out, report_to_json(r).dump(2) + "\n");
      } else {
        write_file(out, report_csv_header() + "\n" + report_csv_row(r) + "\n");
      }
      std::cout << report_csv_row(r) << '\n';
      return 0;
    }
    if (*gen) {
      write_file(out, generate(kind, n, eps, alpha, seed).dump() + "\n");
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
