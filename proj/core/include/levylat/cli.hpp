#pragma once

namespace levylat {

/// Entry point shared by the binary and the harness tests.
/// Exit codes: 0 all checks pass, 1 a computed check failed, 2 usage or
/// validation error.
int cli_dispatch(int argc, const char* const* argv);

}  // namespace levylat
