#pragma once

#include <stdexcept>
#include <string>

namespace gseg3d {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A file was readable but its contents do not follow the expected layout.
class MalformedFileError : public Error {
 public:
  using Error::Error;
};

/// A caller broke a documented precondition.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Invalid or inconsistent configuration (unknown key, bad value, missing seed cell).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// RANSAC could not produce a plane hypothesis.
class FitFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace gseg3d
