#pragma once

#include <stdexcept>
#include <string>

namespace vinoreg {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input file; the message carries file name and line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what),
        file_(file),
        line_(line) {}
  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

/// A loaded dataset violates the panel invariants (unbalanced, bad range, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A period total needed as a denominator is zero.
class DegeneratePeriodError : public Error {
 public:
  using Error::Error;
};

/// Non-finite value produced during a numerical computation.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Optimizer failed to converge within the iteration budget.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Brute-force oracle invoked on a problem larger than its guard allows.
class SizeGuardError : public Error {
 public:
  using Error::Error;
};

}  // namespace vinoreg
