#pragma once

#include "promptpainter/cli/config.hpp"

namespace promptpainter::cli {

/// Exit codes of the command layer.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // I/O and unexpected errors
inline constexpr int kExitConfig = 2;   // invalid configuration or input
inline constexpr int kExitBackend = 3;  // adapter failed to load or answer
inline constexpr int kExitNumeric = 4;  // non-finite loss, run aborted

/// Execute a stylization run: optimization, optional super-resolution,
/// output.png + manifest.json (+ snapshots, + bench.json in bench mode).
int run_command(const CliOptions& opts);

/// run_command with timing aggregation into bench.json.
int bench_command(CliOptions opts);

} // namespace promptpainter::cli
