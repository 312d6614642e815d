// Batch experiment driver behind the `exactdiff` executable.
//
//   exactdiff probe|bet|counterexample|dore-maleva [--config F] [--out F]
//             [--depth N] [--seed N] [--format json|csv]
//
// Exit codes: 0 every assertion passed, 1 an assertion failed, 2 usage or
// config error. Reports are deterministic for a given config and flags.
#pragma once

#include <iosfwd>

namespace exactdiff::cli {

inline constexpr int kPass = 0;
inline constexpr int kAssertionFailure = 1;
inline constexpr int kUsageError = 2;

/// Report goes to `out` (or the --out file), messages to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace exactdiff::cli
