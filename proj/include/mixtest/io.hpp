#pragma once

#include <string>

#include <json.hpp>

#include "mixtest/distribution.hpp"
#include "mixtest/verdict.hpp"

namespace mixtest {

/// {"n", "pmf"} or {"generator", "params"}; "n" may sit at the top level or
/// in params. Generators: uniform, zipf(s), two_step(hi_fraction, hi_mass),
/// kflat_random(k, seed). Throws BadInput.
Distribution distribution_from_json(const nlohmann::json& j);

nlohmann::json distribution_to_json(const Distribution& d);

/// Reads a distribution file. "path#key" selects member `key` of a bundle
/// object such as the one written by `gen`. Throws BadInput.
Distribution load_distribution(const std::string& ref);

nlohmann::json verdict_to_json(const Verdict& v);

}  // namespace mixtest
