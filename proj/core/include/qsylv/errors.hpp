#pragma once

#include <stdexcept>

namespace qsylv {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Dimension mismatch in a matrix operation or block assembly.
struct ShapeError : Error {
  using Error::Error;
};

/// Involution axis is zero or not finite.
struct InvalidAxis : Error {
  using Error::Error;
};

/// Condition window is out of range or not valid for the requested family.
struct BadWindow : Error {
  using Error::Error;
};

/// A square matrix was required.
struct NonSquare : Error {
  using Error::Error;
};

/// Malformed input document; the message names the offending field.
struct ParseError : Error {
  using Error::Error;
};

/// Instance generation exhausted its retry budget.
struct GenerationError : Error {
  using Error::Error;
};

}  // namespace qsylv
