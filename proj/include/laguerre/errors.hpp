#pragma once

#include <stdexcept>
#include <string>

namespace laguerre {

/// Numerical routine refused to run because the result could not meet its
/// accuracy contract (e.g. spectral sum below the trusted time).
class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested combination of inputs is not supported by this routine.
class UnsupportedError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Problem size exceeds a solver's configured cap.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

}  // namespace laguerre
