#ifndef ASYNCCPUC_CLI_HPP
#define ASYNCCPUC_CLI_HPP

#include <ostream>

namespace asynccpuc::cli {

// Exit codes: 0 success, 2 validation/parse failure, 3 numeric failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumeric = 3;

/// Runs the command line (subcommands: validate, capacity, sweep, simulate,
/// arrival). Streams are injectable so tests can run in-process.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace asynccpuc::cli

#endif
