#pragma once

#include <stdexcept>
#include <string>

namespace complement_lab {

/// Operands live on spaces of different dimension.
class DimensionMismatch : public std::invalid_argument {
 public:
  DimensionMismatch(const std::string& what, long expected, long actual)
      : std::invalid_argument(what + ": expected dimension " + std::to_string(expected) +
                              ", got " + std::to_string(actual)) {}
  explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

/// A value violates the invariant of the type it is being turned into
/// (non-Hermitian projector, unnormalized state, out-of-range mode, ...).
class InvariantViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Spectral subset enumeration would exceed the configured cap.
class TooManySpectralPoints : public std::length_error {
 public:
  using std::length_error::length_error;
};

inline void require_same_dimension(const std::string& what, long expected, long actual) {
  if (expected != actual) {
    throw DimensionMismatch(what, expected, actual);
  }
}

}  // namespace complement_lab
