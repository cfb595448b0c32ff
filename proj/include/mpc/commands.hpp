#pragma once

namespace mpc {

// Parses argv, dispatches to the subcommands, maps error types to exit codes
// (usage 2, malformed data 3, numeric failure 4).
int run_cli(int argc, const char* const* argv);

}  // namespace mpc
