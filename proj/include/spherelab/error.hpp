#pragma once

#include <stdexcept>
#include <string>

namespace spherelab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument violates a documented precondition (dimension, range, shape).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A configuration is geometrically inadmissible, e.g. it violates the
/// diameter condition or its Gram matrix is not positive semidefinite.
class InvalidConfiguration : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed beyond its tolerance.
class NumericalError : public Error {
 public:
  using Error::Error;
};

namespace detail {
inline void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument(what);
}
}  // namespace detail

}  // namespace spherelab
