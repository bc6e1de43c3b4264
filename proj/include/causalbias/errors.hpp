#pragma once

#include <stdexcept>
#include <string>

namespace causalbias {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file (graph file, CSV, inline spec). Carries "file:line: message".
class ParseError : public Error {
 public:
  ParseError(const std::string& source, int line, const std::string& message)
      : Error(source + ":" + std::to_string(line) + ": " + message), line_(line) {}
  explicit ParseError(const std::string& message) : Error(message), line_(0) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Requested computation does not match the causal structure (missing confounder,
/// role mismatch, assumption violation).
class StructureError : public Error {
 public:
  using Error::Error;
};

/// A conditioning stratum has zero probability.
class PositivityError : public Error {
 public:
  using Error::Error;
};

/// Collinear predictors or a vanishing denominator; the message names the term.
class SingularError : public Error {
 public:
  using Error::Error;
};

}  // namespace causalbias
