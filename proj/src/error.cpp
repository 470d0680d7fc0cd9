#include "omrav/error.hpp"

namespace omrav {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::CoincidentPoints: return "CoincidentPoints";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::BelowMinDistance: return "BelowMinDistance";
    case ErrorKind::OutOfBox: return "OutOfBox";
    case ErrorKind::PowerOutOfRange: return "PowerOutOfRange";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::ZeroThrust: return "ZeroThrust";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace omrav
