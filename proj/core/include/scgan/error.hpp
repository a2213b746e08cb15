#pragma once

#include <stdexcept>
#include <string>

namespace scgan {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes or sizes of two inputs that must agree do not.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Configuration value outside its allowed domain, or an unknown key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// File missing, undecodable, or not writable.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace scgan
