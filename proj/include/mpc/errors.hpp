#pragma once

#include <stdexcept>

namespace mpc {

// Error taxonomy shared by the library and the CLI.  The CLI maps these to
// exit codes: UsageError -> 2, FormatError -> 3, NumericError -> 4.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mpc
