#pragma once

namespace tacshear {

// Command-line front end (simulate, calibrate, compare, bench,
// sample-surface). Exit codes: 0 success, 1 usage error, 2 malformed data,
// 3 numerical degeneracy.
int run_cli(int argc, const char* const* argv);

}  // namespace tacshear
