#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace armcal {

/// Root of the library's exception hierarchy. Input validation failures use
/// std::invalid_argument directly.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed file content. `line()` is 1-based; 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(std::string path, std::size_t line, const std::string& what)
      : Error(path + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
        path_(std::move(path)),
        line_(line) {}

  const std::string& path() const noexcept { return path_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string path_;
  std::size_t line_;
};

/// A linear-algebra step could not be carried out (singular innovation, rank
/// deficiency, non-finite intermediate values).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Particle weights all vanished.
class DegenerateWeightsError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Training loss blew up.
class DivergedError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace armcal
