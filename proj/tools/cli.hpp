#pragma once

#include <iosfwd>

namespace disorder::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsage = 1,
  kValidation = 2,
  kInvariant = 3,
};

/// Entry point of the `disorder` command line tool. Results go to `out`,
/// diagnostics (one JSON object per line) to `err`.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace disorder::cli
