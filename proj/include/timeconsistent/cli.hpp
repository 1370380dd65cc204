#pragma once

// Batch front end: one subcommand per solver, a JSON config in, CSV and JSON
// artifacts out. Exit status 0 on success, 1 on configuration or
// precondition errors, 2 when a solver fails to converge.

#include <iosfwd>
#include <string>

#include "timeconsistent/config.hpp"

namespace tc::cli {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNonConvergence = 2;

/// Runs a parsed configuration. Artifacts are written only once the whole
/// computation has succeeded (or, on non-convergence, the JSON report
/// carrying the residual history).
int run(const RunConfig& config, std::ostream& err);

/// Entry point of the `tcc` binary.
int main(int argc, char** argv);

/// Writes `content` to a temporary sibling and renames it over `path`.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace tc::cli
