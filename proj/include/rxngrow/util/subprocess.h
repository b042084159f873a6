//
// SPDX-License-Identifier: Apache-2.0
//

#ifndef RXNGROW_UTIL_SUBPROCESS_H_
#define RXNGROW_UTIL_SUBPROCESS_H_

#include <optional>
#include <string>
#include <vector>

namespace rxngrow {

struct ProcessResult {
  int exit_code = 0;  // 128 + signal number when killed by a signal
  std::string out;
  std::string err;
};

// Resolves a program name against PATH. Names containing '/' are checked
// as given.
std::optional<std::string> find_executable(const std::string &name);

// Runs argv without a shell and waits for it. stdout and stderr are
// captured. Throws ToolNotFoundError when argv[0] cannot be executed.
ProcessResult run_process(const std::vector<std::string> &argv);

}  // namespace rxngrow

#endif  // RXNGROW_UTIL_SUBPROCESS_H_
