#ifndef GNNFLOW_TOOLS_CLI_HPP_
#define GNNFLOW_TOOLS_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace gnnflow::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitIllegal = 3;

// Runs the tool with argv-style arguments (args[0] is the program name) and
// returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gnnflow::cli

#endif  // GNNFLOW_TOOLS_CLI_HPP_
