#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace netvec {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Raised when training produces non-finite parameters or loss.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

// An error annotated with the pipeline stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("[" + stage + "] " + what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace netvec
