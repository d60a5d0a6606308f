#include "mixtest/io.hpp"

#include <fstream>

#include "mixtest/errors.hpp"
#include "mixtest/instances.hpp"

namespace mixtest {

namespace {

std::size_t domain_of(const nlohmann::json& j, const nlohmann::json& params) {
  if (params.contains("n")) return params.at("n").get<std::size_t>();
  if (j.contains("n")) return j.at("n").get<std::size_t>();
  fail(ErrorKind::BadInput, "generator needs n");
}

}  // namespace

Distribution distribution_from_json(const nlohmann::json& j) {
  try {
    if (j.contains("pmf")) {
      const auto pmf = j.at("pmf").get<std::vector<double>>();
      if (j.contains("n") && j.at("n").get<std::size_t>() != pmf.size()) {
        fail(ErrorKind::BadInput, "n disagrees with pmf length");
      }
      return Distribution(pmf);
    }
    if (!j.contains("generator")) fail(ErrorKind::BadInput, "need pmf or generator");
    const std::string gen = j.at("generator").get<std::string>();
    const nlohmann::json params = j.value("params", nlohmann::json::object());
    const std::size_t n = domain_of(j, params);
    if (gen == "uniform") return Distribution::uniform(n);
    if (gen == "zipf") return zipf_distribution(n, params.value("s", 1.0));
    if (gen == "two_step") {
      return two_step_distribution(n, params.at("hi_fraction").get<double>(), params.at("hi_mass").get<double>());
    }
    if (gen == "kflat_random") {
      Rng rng(params.value("seed", std::uint64_t{0}));
      return random_kflat(n, params.at("k").get<std::size_t>(), rng);
    }
    fail(ErrorKind::BadInput, "unknown generator '" + gen + "'");
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::BadInput, e.what());
  }
}

nlohmann::json distribution_to_json(const Distribution& d) {
  return {{"n", d.size()}, {"pmf", std::vector<double>(d.pmf().begin(), d.pmf().end())}};
}

Distribution load_distribution(const std::string& ref) {
  const auto hash = ref.find('#');
  const std::string path = ref.substr(0, hash);
  std::ifstream in(path);
  if (!in) fail(ErrorKind::BadInput, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::BadInput, path + ": " + e.what());
  }
  if (hash != std::string::npos) {
    const std::string key = ref.substr(hash + 1);
    if (!j.contains(key)) fail(ErrorKind::BadInput, path + " has no member " + key);
    return distribution_from_json(j.at(key));
  }
  return distribution_from_json(j);
}

nlohmann::json verdict_to_json(const Verdict& v) {
  return {{"accepted", v.accepted},   {"statistic", v.statistic},   {"threshold", v.threshold},
          {"samples_used", v.samples_used}, {"details", v.details}, {"candidates", v.candidates}};
}

}  // namespace mixtest
