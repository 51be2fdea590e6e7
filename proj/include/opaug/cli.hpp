#pragma once

#include <iosfwd>

namespace opaug {

/// Entry point of the `opaug` tool. Returns 0, 1 (runtime failure) or 2 (bad configuration).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace opaug
