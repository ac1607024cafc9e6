#pragma once

#include <iosfwd>

namespace adastep {

/// Entry point of the `adastep` command line tool.
/// Returns 0 on success, 1 on a failed run or check, 2 on a usage or config error.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace adastep
