#ifndef PFLOW_CLI_H_
#define PFLOW_CLI_H_

#include <ostream>

namespace pflow {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInfeasible = 1;
inline constexpr int kExitUsage = 2;

// Entry point of the pflow command line tool. Subcommands:
//   plan <file>                      greedy path as CSV t,row,col,action
//   mintime <file>                   minimum horizon T_min
//   flows <file> --out-dir D         per-t forward/backward/posterior frames
//   sample <file> --n K --seed X     K sampled paths
//   simulate <file> --out-dir D      multi-agent trace and per-agent CSVs
// Exit codes: 0 success, 1 infeasible, 2 usage or parse error.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pflow

#endif  // PFLOW_CLI_H_
