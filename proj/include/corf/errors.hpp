#pragma once

#include <stdexcept>
#include <string>

namespace corf {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File missing or unreadable/unwritable.
class IoError : public Error {
 public:
  using Error::Error;
};

/// File exists but is not a format this library accepts.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Shape mismatch between images, maps, kernels or tensors.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Cell configuration produced no usable sub-units.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Training loss became non-finite.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace corf
