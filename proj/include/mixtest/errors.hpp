#pragma once

#include <stdexcept>
#include <string>

namespace mixtest {

enum class ErrorKind {
  EmptyDomain,
  NegativeWeight,
  ZeroMass,
  NotNormalized,
  InvalidAlpha,
  DomainMismatch,
  IncompletePartition,
  OverlappingCells,
  EmptyCell,
  IndexOutOfRange,
  InvalidEpsilon,
  InvalidArgument,
  InsufficientSamples,
  EmptyCounts,
  InvalidK,
  InfeasibleParameters,
  Infeasible,
  UnknownTester,
  BadInput,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace mixtest
