#pragma once

#include <iosfwd>
#include <string>

#include "fracstar/cli/config.hpp"

namespace fracstar::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidInput = 1;
inline constexpr int kExitRuntimeFailure = 2;

/// Runs one command, writes its CSV and manifest into config.out_dir and a
/// short summary to `out`. Returns 0, 1 (invalid input) or 2 (runtime failure).
int dispatch(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full command-line entry point (argument parsing + dispatch).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fracstar::cli
