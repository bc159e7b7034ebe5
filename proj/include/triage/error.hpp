#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace triage {

/// Root of every error this library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition or invariant on an input value does not hold.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A well-formed record that would break a store rule, such as a NonIssue
/// label without a pattern code.
class ConflictError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A data file (lexicon, rules, catalog, corpus, model) failed to parse.
class LoadError : public Error {
 public:
  LoadError(std::string source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what),
        source_(std::move(source)),
        line_(line) {}

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

/// Training input is unusable (single class, too few examples).
class TrainingError : public Error {
 public:
  using Error::Error;
};

/// Lookup of an id that the store does not know.
class NotFoundError : public Error {
 public:
  using Error::Error;
};

}  // namespace triage
