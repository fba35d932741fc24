#pragma once

namespace tfz {

// Full command-line front end; returns the process exit code
// (0 success, 1 usage error, 2 runtime error).
int run_cli(int argc, const char* const* argv);

}  // namespace tfz
