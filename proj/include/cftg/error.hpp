#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cftg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text. line() is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Two distinct paths compare equal under the perturbed metric; reseed.
class UniquenessViolation : public Error {
 public:
  using Error::Error;
};

// A randomized step did not succeed within its retry cap.
class RetryExhausted : public Error {
 public:
  using Error::Error;
};

}  // namespace cftg
