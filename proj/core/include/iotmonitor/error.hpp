#ifndef IOTMONITOR_ERROR_HPP
#define IOTMONITOR_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace iotmonitor {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Matrix, vector or table shapes disagree, or a dimension is zero.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An observation index does not name a symbol of the model's alphabet.
class AlphabetError : public Error {
 public:
  using Error::Error;
};

/// An operation that needs at least one element received none.
class EmptyInputError : public Error {
 public:
  using Error::Error;
};

/// A caller-supplied argument is outside its documented domain.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A model violates its stochasticity constraints or cannot explain the data.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Too few verified events survive windowing to train and decode.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// A chain specification is malformed or violates its invariants.
class SpecError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input. line() is 1-based; 0 means "no particular line".
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error(line == 0 ? message
                        : "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace iotmonitor

#endif  // IOTMONITOR_ERROR_HPP
