#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace affectcouple {

enum class ErrorCode {
  range,           // value outside its admissible interval
  validation,      // structurally invalid input
  parse,           // unparsable text
  lookup,          // term not present in the taxonomy
  duplicate,       // repeated identifier
  not_found,       // unknown document or session id
  session_closed,  // event on a terminal session
  conflict,        // concurrent or ordering conflict
  version,         // unsupported on-disk format
  io,
  no_reference,    // no annotated documents to estimate from
  usage,
};

/// Machine-readable upper-case name, e.g. "RANGE".
std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string detail = {})
      : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

  ErrorCode code() const noexcept { return code_; }

  /// Offending field path or term, when one applies.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace affectcouple
