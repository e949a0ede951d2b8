#pragma once

#include <string>
#include <vector>

#include "mdseval/config.hpp"

namespace mdseval::cli {

// Entry point behind the mdseval binary. Returns 0 on success, 1 on a typed
// domain failure, 2 on a usage error. args excludes the program name.
int dispatch(const std::vector<std::string>& args);

}  // namespace mdseval::cli
