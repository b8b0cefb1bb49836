#pragma once

#include <stdexcept>
#include <string>

namespace sheat {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input data: degenerate polygons, non-finite samples, bad sizes.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A grid or parameter choice that cannot host the requested computation.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// The request is well formed but outside what this code implements.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// A numerical kernel failed (factorization, non-finite result).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace sheat
