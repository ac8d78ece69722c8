#pragma once

namespace twomode {

// CLI entry point. Commands: evolve, scan, optimize, bounds, depth, table1,
// crosscheck. Returns the process exit code:
//   0 success, 2 invalid arguments, 3 solver non-convergence,
//   4 internal consistency failure.
int run(int argc, const char* const* argv);

}  // namespace twomode
