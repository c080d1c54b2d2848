#ifndef VSYNOPSIS_ERROR_HPP
#define VSYNOPSIS_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vsyn {

/// Base of every error the engine throws. The CLI maps IoError to exit code 2
/// and everything else to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input bytes. `line` is 1-based; 0 when unknown.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A value parsed fine but violates an invariant. `field` names the offender.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& field, const std::string& what)
      : Error(field + ": " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// A track changed its class label mid-log.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Time went backwards where it must not.
class OrderingError : public Error {
 public:
  using Error::Error;
};

/// Non-finite numeric input.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Operation not valid in the object's current state (e.g. no classes yet).
class StateError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace vsyn

#endif  // VSYNOPSIS_ERROR_HPP
