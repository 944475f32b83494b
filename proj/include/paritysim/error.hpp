#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace paritysim {

enum class ErrorKind {
  ZeroOddCat,
  OrderTooHigh,
  VacuumState,
  BadEfficiency,
  GridTooSmall,
  DegenerateReferences,
  NotConverged,
  InsufficientStatistics,
  SingularConfusion,
  InvalidArgument,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorKind kind);

/// Library exception. Every failure path in paritysim throws this type (or a
/// subclass) tagged with the kind of failure.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

}  // namespace paritysim
