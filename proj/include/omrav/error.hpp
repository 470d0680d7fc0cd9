#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace omrav {

enum class ErrorKind {
  ZeroVector,
  CoincidentPoints,
  DomainError,
  BelowMinDistance,
  OutOfBox,
  PowerOutOfRange,
  BudgetExceeded,
  ZeroThrust,
  ParseError,
  ValidationError,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every library failure is reported through this exception; `kind()` is the
// machine-readable category the CLI prints on exit.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

}  // namespace omrav
