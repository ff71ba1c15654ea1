#pragma once

#include <iosfwd>

namespace ismpc::cli {

/// Entry point of the `ismpc_sim` tool. Returns the process exit code:
/// 0 success, 2 configuration/usage error, 3 run ended infeasible,
/// 4 divergence detected, 1 failed self-check.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ismpc::cli
