#pragma once

namespace tcsel::cli {

// Exit codes: 0 success, 1 configuration or usage error, 2 data error,
// 3 numerical failure.
enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitData = 2, kExitNumerical = 3 };

int run(int argc, char** argv);

}  // namespace tcsel::cli
