#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace avatar {

// Base for every error raised by the library. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

class InvalidInput : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "invalid_input"; }
};

class PreconditionError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "precondition"; }
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "degenerate_input"; }
};

class TrainingError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "training"; }
};

class BuildError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "build"; }
};

// Wraps another library error with context (for example the experiment stage
// that failed) while keeping its kind.
class ContextError : public Error {
 public:
  ContextError(const std::string& context, const Error& cause)
      : Error(context + ": " + cause.what()), kind_(cause.kind()) {}

  const char* kind() const noexcept override { return kind_.c_str(); }

 private:
  std::string kind_;
};

// Raised when playout exhausts its expansion budget; carries how many
// variants had been found at that point.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(std::uint64_t expansions, std::size_t partial_count)
      : Error("playout expansion budget exceeded after " + std::to_string(expansions) +
              " expansions (" + std::to_string(partial_count) + " variants found)"),
        expansions_(expansions),
        partial_count_(partial_count) {}

  const char* kind() const noexcept override { return "budget_exceeded"; }
  std::uint64_t expansions() const noexcept { return expansions_; }
  std::size_t partial_count() const noexcept { return partial_count_; }

 private:
  std::uint64_t expansions_;
  std::size_t partial_count_;
};

}  // namespace avatar
