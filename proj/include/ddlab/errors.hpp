#pragma once

#include <stdexcept>
#include <string>

namespace ddlab {

// Base class for every library failure. The CLI maps these to exit code 3
// (numerical failure) unless they are ConfigError, which maps to exit code 2.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : Error {
  using Error::Error;
};

struct RankError : Error {
  using Error::Error;
};

// Cholesky / SPD failures. pivot is the zero-based index of the failing
// pivot (leading minor of order pivot+1), or -1 when the input was not
// symmetric in the first place.
struct NotSpdError : Error {
  int pivot;
  NotSpdError(const std::string& what, int pivot_index) : Error(what), pivot(pivot_index) {}
};

struct DomainViolation : Error {
  using Error::Error;
};

struct NotAtModeError : Error {
  using Error::Error;
};

struct DegreesOfFreedomError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace ddlab
