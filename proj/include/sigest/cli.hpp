#pragma once

namespace sigest {

// Full command-line surface; returns the process exit code:
// 0 success, 1 validation/usage error, 2 numeric or simulation failure.
int run_cli(int argc, const char* const* argv);

}  // namespace sigest
