#include "affectcouple/error.hpp"

namespace affectcouple {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::range: return "RANGE";
    case ErrorCode::validation: return "VALIDATION";
    case ErrorCode::parse: return "PARSE";
    case ErrorCode::lookup: return "LOOKUP";
    case ErrorCode::duplicate: return "DUPLICATE";
    case ErrorCode::not_found: return "NOT_FOUND";
    case ErrorCode::session_closed: return "SESSION_CLOSED";
    case ErrorCode::conflict: return "CONFLICT";
    case ErrorCode::version: return "VERSION";
    case ErrorCode::io: return "IO";
    case ErrorCode::no_reference: return "NO_REFERENCE";
    case ErrorCode::usage: return "USAGE";
  }
  return "UNKNOWN";
}

}  // namespace affectcouple
