#include "mixtest/errors.hpp"

namespace mixtest {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyDomain: return "EmptyDomain";
    case ErrorKind::NegativeWeight: return "NegativeWeight";
    case ErrorKind::ZeroMass: return "ZeroMass";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::InvalidAlpha: return "InvalidAlpha";
    case ErrorKind::DomainMismatch: return "DomainMismatch";
    case ErrorKind::IncompletePartition: return "IncompletePartition";
    case ErrorKind::OverlappingCells: return "OverlappingCells";
    case ErrorKind::EmptyCell: return "EmptyCell";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::InvalidEpsilon: return "InvalidEpsilon";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InsufficientSamples: return "InsufficientSamples";
    case ErrorKind::EmptyCounts: return "EmptyCounts";
    case ErrorKind::InvalidK: return "InvalidK";
    case ErrorKind::InfeasibleParameters: return "InfeasibleParameters";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::UnknownTester: return "UnknownTester";
    case ErrorKind::BadInput: return "BadInput";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace mixtest
