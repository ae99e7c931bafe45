#pragma once

#include <iosfwd>
#include <string>

namespace aderdg {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitVerification = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitAnalysis = 4;

struct CliConfig {
  int max_order = 24;       // verify cap
  int default_digits = 120;
};

/// key=value lines, '#' comments. Unknown keys are a ParseError.
CliConfig load_cli_config(const std::string& path);

/// Entry point of the `aderdg` tool; the config file named by
/// $ADERDG_CONFIG (or --config) overrides the defaults above.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace aderdg
