#ifndef NERO_ERROR_HPP
#define NERO_ERROR_HPP

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

namespace nero {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `location()` is a 1-based line (files) or 0-based
/// character offset (concept expressions), depending on the source.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t location) : Error(what), location_(location) {}
  std::size_t location() const { return location_; }

 private:
  std::size_t location_;
};

/// A name that does not exist in the governing knowledge base or model.
class UnknownNameError : public Error {
 public:
  UnknownNameError(const std::string& kind, const std::string& name)
      : Error("unknown " + kind + " '" + name + "'"), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// Invalid argument or configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Corrupt, truncated or incompatible persisted data.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Non-finite loss during training.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::size_t epoch) : Error(what), epoch_(epoch) {}
  std::size_t epoch() const { return epoch_; }

 private:
  std::size_t epoch_;
};

using WarningHandler = std::function<void(const std::string&)>;

/// Replaces the process-wide warning sink (stderr by default). Returns the
/// previous handler. Not thread-safe with respect to concurrent warn() calls.
WarningHandler set_warning_handler(WarningHandler handler);
void warn(const std::string& message);

}  // namespace nero

#endif  // NERO_ERROR_HPP
