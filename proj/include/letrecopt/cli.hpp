#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace letrecopt {

inline constexpr int kExitUsage = 64;
inline constexpr int kExitData = 65;
inline constexpr int kExitInternal = 70;

/// Runs one `letrec-opt` invocation; `args` excludes the program name.
int runCommand(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace letrecopt
