#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace airbs::cli {

/// Exit codes: 0 success, 1 runtime/I-O failure, 2 usage or configuration error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Entry point shared by the executable and the tests. `args` excludes argv[0].
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace airbs::cli
