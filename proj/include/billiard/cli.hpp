#ifndef BILLIARD_CLI_HPP
#define BILLIARD_CLI_HPP

#include <string>
#include <vector>

namespace billiard::cli {

/// Entry point behind the `billiard` executable. Subcommands: domain, map,
/// orbit, beta, caustics, invariants, fit, ratios, verify. Payloads go to
/// --out (or stdout); one-line summaries go to stderr. Exit codes: 0 ok,
/// 1 verification failure, 2 config error, 3 numerical nonconvergence.
int run(int argc, const char* const* argv);

/// Convenience overload for in-process tests.
int run(const std::vector<std::string>& args);

} // namespace billiard::cli

#endif
