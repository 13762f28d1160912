#pragma once

#include <stdexcept>

namespace ksnd::cli {

/// Process exit codes.
enum ExitCode : int {
  exit_ok = 0,
  exit_config = 2,
  exit_nonconvergence = 3,
  exit_violation = 4,
  exit_io = 5,
};

/// Unreadable, unwritable, truncated or corrupted files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ksnd::cli
