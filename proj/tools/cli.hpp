#ifndef RBO_TOOLS_CLI_HPP
#define RBO_TOOLS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace rbo::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kPropertyFailure = 1,
  kUsageError = 2,
};

/// Entry point shared by the `rbo` binary and the tests. args[0] is the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rbo::cli

#endif  // RBO_TOOLS_CLI_HPP
