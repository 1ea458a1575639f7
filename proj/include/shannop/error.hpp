#pragma once

#include <stdexcept>
#include <string>

namespace shannop {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes, sizes or arities that do not fit together.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// A spectrum that is not Hermitian was asked to produce a real field.
class RealityError : public Error {
 public:
  using Error::Error;
};

/// A symbol was evaluated at a singular mode under the Error policy.
class SingularModeError : public Error {
 public:
  using Error::Error;
};

class UnsupportedSchemeError : public Error {
 public:
  using Error::Error;
};

/// A scalar symbol vanishes or changes sign inside a band.
class NotInvertibleOnBandError : public Error {
 public:
  using Error::Error;
};

/// Malformed SWF1 data or report files.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Symbol grammar errors; position is the 0-based byte offset in the input.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

}  // namespace shannop
