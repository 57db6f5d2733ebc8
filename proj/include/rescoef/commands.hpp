#pragma once

#include "rescoef/config.hpp"

namespace rescoef {

/// Batch subcommands. Each writes its artifacts under the job's output
/// directory (atomically, 17-digit floats, no timestamps) and returns the
/// process exit status: 0 on success, 1 when a verification check fails.
/// Config and numerical failures are thrown and mapped to 2 / 3 by the CLI.
int run_greedy(const GreedyJob& job);
int run_online(const OnlineJob& job);
int run_minimax(const MinimaxJob& job);
int run_verify(const VerifyJob& job);

}  // namespace rescoef
