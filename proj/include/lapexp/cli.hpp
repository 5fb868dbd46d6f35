#pragma once

namespace lapexp {

/// Batch front end. Exit codes: 0 success, 1 unexpected, 2 variational
/// failure (no root, tied maximizers, boundary maximum), 3 criticality,
/// 4 I/O or malformed input,
/// 5 gate failure in verify.
int run_cli(int argc, const char* const* argv);

}  // namespace lapexp
