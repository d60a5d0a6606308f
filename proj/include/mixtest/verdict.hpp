#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace mixtest {

struct Verdict {
  bool accepted = false;
  double statistic = 0.0;
  double threshold = 0.0;
  std::int64_t samples_used = 0;
  std::map<std::string, double> details;
  std::vector<double> candidates;  ///< α values examined, when the tester has any
};

/// Majority vote over an odd number of runs. statistic counts rejecting runs,
/// threshold is half the run count, so accepted ⇔ statistic ≤ threshold.
Verdict majority(const std::vector<Verdict>& runs);

}  // namespace mixtest
