#pragma once

#include <stdexcept>
#include <string>

namespace specmix {

// File and format problems. The CLI maps these to exit code 2.
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failures (iteration caps, degenerate systems). Exit code 1.
class compute_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace specmix
