#pragma once

#include <stdexcept>
#include <string>

namespace wrfm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller passed an argument outside the documented domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A derivative of an order the object cannot provide was requested.
class UnsupportedOrder : public Error {
 public:
  using Error::Error;
};

/// The requested combination of options is not supported (e.g. overlapping
/// partition of unity with the weak pipeline).
class UnsupportedConfiguration : public Error {
 public:
  using Error::Error;
};

/// Numerical input is malformed (non-finite entries, empty matrices).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace wrfm
