#pragma once

namespace displab::cli {

/// Parse argv, execute the chosen subcommand, and write its outputs under
/// <outdir>/<command>/<label>/.  Returns 0 on success, 2 on configuration or
/// validation errors, 3 on numerical failure.
int run(int argc, char** argv);

}  // namespace displab::cli
