#include "paritysim/error.hpp"

namespace paritysim {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ZeroOddCat: return "ZeroOddCat";
    case ErrorKind::OrderTooHigh: return "OrderTooHigh";
    case ErrorKind::VacuumState: return "VacuumState";
    case ErrorKind::BadEfficiency: return "BadEfficiency";
    case ErrorKind::GridTooSmall: return "GridTooSmall";
    case ErrorKind::DegenerateReferences: return "DegenerateReferences";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::InsufficientStatistics: return "InsufficientStatistics";
    case ErrorKind::SingularConfusion: return "SingularConfusion";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace paritysim
