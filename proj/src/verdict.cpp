#include "mixtest/verdict.hpp"

#include "mixtest/errors.hpp"

namespace mixtest {

Verdict majority(const std::vector<Verdict>& runs) {
  if (runs.empty() || runs.size() % 2 == 0) fail(ErrorKind::InvalidArgument, "majority needs an odd run count");
  if (runs.size() == 1) return runs.front();
  Verdict out;
  double rejects = 0.0;
  for (const Verdict& v : runs) {
    if (!v.accepted) rejects += 1.0;
    out.samples_used += v.samples_used;
  }
  out.statistic = rejects;
  out.threshold = static_cast<double>(runs.size() / 2);
  out.accepted = out.statistic <= out.threshold;
  out.details["runs"] = static_cast<double>(runs.size());
  return out;
}

}  // namespace mixtest
