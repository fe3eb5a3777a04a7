#pragma once

#include <stdexcept>
#include <string>

namespace tdw {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument to a numerical routine (out-of-range degree, |x| > 1, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A physically unsupported configuration detected while running the model.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Invalid or incomplete run configuration. `field` is a dotted path.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what), field_(field) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// File-system failures; the message always carries the path.
class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace tdw
