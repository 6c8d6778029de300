#pragma once

#include <iosfwd>

namespace affectcouple {

/// Entry point of the `affectcouple` command. Exit codes: 0 success,
/// 1 validation/domain error, 2 usage error. Failures print one line
/// `error[CODE]: message` to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace affectcouple
