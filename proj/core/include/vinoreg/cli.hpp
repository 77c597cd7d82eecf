#pragma once

namespace vinoreg {

/// Command-line entry point. Subcommands: validate, features, fit,
/// test-hypothesis, simulate, charts. Returns the process exit code:
/// 0 on success, 1 on data/runtime errors, 2 on usage errors.
int run_cli(int argc, const char* const* argv);

}  // namespace vinoreg
