#pragma once

#include <ostream>

namespace sopa::cli {

// Runs the sopa command line. Returns 0 on success, 1 on input or
// validation failures, 2 on usage errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sopa::cli
