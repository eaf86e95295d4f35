#pragma once

namespace dexfit {

/// Runs one subcommand. Returns 0 on success, 1 on usage errors and 2 on
/// runtime failures.
int dispatch(int argc, char** argv);

}  // namespace dexfit
