#pragma once

#include <stdexcept>
#include <string>

namespace mtsim {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Input record or resource file does not follow its grammar.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A caller-side precondition or data invariant does not hold.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace mtsim
