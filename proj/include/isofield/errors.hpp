#pragma once

#include <stdexcept>
#include <string>

namespace isofield {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Jacobi parameters outside alpha, beta > -1 (or a negative degree).
class ParameterDomainError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a function, e.g. x outside [-1, 1].
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative numeric routine did not converge.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Unsupported (family, dimension) combination or inconsistent model setup.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Point-level geometry requested for a space that only has parameter support.
class UnsupportedGeometryError : public Error {
 public:
  using Error::Error;
};

/// Caller mixed incompatible inputs (mismatched spaces, lag domains, ...).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Model failed its validity check where a valid model is required.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Matrix square root requested for a matrix with a negative eigenvalue.
class IndefiniteMatrixError : public Error {
 public:
  IndefiniteMatrixError(const std::string& what, double eigenvalue)
      : Error(what), eigenvalue_(eigenvalue) {}
  double eigenvalue() const noexcept { return eigenvalue_; }

 private:
  double eigenvalue_;
};

/// Bad numeric input such as NaN produced by a user callback.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Malformed model or realization document.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace isofield
