#pragma once

#include <iosfwd>

namespace relbgk::cli {

/// Entry point shared by the executable and the tests. Exit codes: 0 success,
/// 1 usage, domain or validation error, 2 internal error.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace relbgk::cli
