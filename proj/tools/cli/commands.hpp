#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kst::cli {

// Process exit codes. 0 and 1 carry the verdict so shell pipelines can treat
// a rejected null (drift) as a failing condition.
inline constexpr int kExitAccept = 0;
inline constexpr int kExitReject = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitInternal = 70;

/// Runs the `kst` command line. args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kst::cli
