#pragma once

#include <stdexcept>
#include <string>

namespace hymos {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document. `path()` is a JSON-path such as `$.tables[2].keys`.
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// A program, topology or configuration failed semantic checks.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Table entries that do not fit the table or action they target.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Violated runtime invariant (double encapsulation, fabric misdelivery, ...).
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace hymos
