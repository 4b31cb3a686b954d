#pragma once

#include <stdexcept>
#include <string>

namespace tacgraph {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Rotation angle at or beyond pi, where the logarithm map is not unique.
struct DegenerateRotationError : Error {
  using Error::Error;
};

/// Normal equations are rank deficient; message names the offending variables.
struct IndeterminateSystemError : Error {
  using Error::Error;
};

/// Bad scenario/config input.
struct ConfigError : Error {
  using Error::Error;
};

/// Contact formation change that the protocol does not allow.
struct IllegalTransitionError : Error {
  using Error::Error;
};

}  // namespace tacgraph
