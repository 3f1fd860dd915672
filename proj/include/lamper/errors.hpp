#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lamper {

// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DatasetError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A text would exceed the backend's token budget, or no slicing fits it.
class BudgetError : public Error {
 public:
  using Error::Error;
};

// Remote backend unreachable or returned an unusable response.
class BackendError : public Error {
 public:
  using Error::Error;
};

// Raw-series benchmark requested on a dataset whose series differ in length.
class UnequalLengthError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::size_t line = 0)
      : Error(line ? "config line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace lamper
