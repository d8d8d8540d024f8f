// Command-line front end.
//
//   stopwell [common flags] <subcommand> [flags]
//
// Subcommands: thresholds, boundary, value, voi, oracle, verify, figures, replay.
// Exit codes: 0 success, 1 invalid input, 2 numerical failure (non-convergence
// or a failed verification), 3 I/O error.
#pragma once

namespace stopwell::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitIo = 3;

int run(int argc, char** argv);

}  // namespace stopwell::cli
