#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gcrl {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `gcrl` tool. `args` excludes the program name.
/// Returns 0 on success, 2 on usage or configuration errors, 1 on runtime
/// failures.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gcrl
