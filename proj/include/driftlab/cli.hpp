#pragma once

#include <iosfwd>

namespace driftlab {

/// Entry point for the `driftlab` executable.
///
/// Exit codes: 0 success, 2 usage or input error, 3 numeric failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

}  // namespace driftlab
