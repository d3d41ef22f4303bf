#pragma once

#include <stdexcept>

namespace flt {

// Malformed user input (files, flags). The CLI maps this to exit code 2;
// anything else escaping a command is a numerical failure, exit code 3.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace flt
