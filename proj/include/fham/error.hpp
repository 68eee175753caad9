#pragma once

#include <stdexcept>
#include <string>

namespace fham {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration: bad grid, unknown backend, malformed config file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A parameter lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Caller misuse, e.g. mismatched field lengths.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Numerical backend failure that should not happen for valid input.
class InternalError : public Error {
 public:
  using Error::Error;
};

/// Iterative method stopped without meeting its tolerance.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double best_residual, std::size_t iterations)
      : Error(what), best_residual_(best_residual), iterations_(iterations) {}

  double best_residual() const noexcept { return best_residual_; }
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  double best_residual_;
  std::size_t iterations_;
};

}  // namespace fham
