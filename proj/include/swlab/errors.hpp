#pragma once

#include <stdexcept>
#include <string>

namespace swlab {

/// Precondition violated by a caller (bad leg index, weight mismatch, ...).
struct argument_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A dense object would exceed the configured size cap.
struct resource_error : std::length_error {
  using std::length_error::length_error;
};

/// An iterative or rank-revealing computation did not meet its tolerance.
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

} // namespace swlab
