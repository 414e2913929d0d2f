#pragma once

#include <exception>
#include <string>

#include "moran_cli/config.hpp"

namespace moran::cli {

enum ExitCode : int {
  kSuccess = 0,
  kConfigError = 2,
  kAxiomFailure = 3,
  kNonConvergence = 4,
};

struct RunOutcome {
  int exit_code = kSuccess;
  /// Report text in the configured format (also produced on exit 3).
  std::string output;
  /// One-line summary or error message.
  std::string message;
};

/// Runs the configured command. Library errors map to exit codes: invalid
/// arguments 2, axiom violations 3, non-convergence 4. Reports whose hard
/// axioms fail are returned with exit code 3.
RunOutcome run(const RunConfig& config);

int exit_code_for(const std::exception& error);

}  // namespace moran::cli
