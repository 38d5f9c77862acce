#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mpnd {

// Malformed input text. `line` is 1-based, 0 when the error has no location.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Well-formed input whose content breaks a model invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A request the algorithm refuses, e.g. an enumeration above its size cap.
class LimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mpnd
