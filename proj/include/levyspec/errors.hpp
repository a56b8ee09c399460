#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace levyspec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition violated: argument out of its documented domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Model combination the requested operation cannot handle.
class UnsupportedModel : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature did not reach its tolerance.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double residual)
      : Error(what + " (residual estimate " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Malformed input file; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// The Euler characteristic never stabilised on the kappa grid.
class NoStabilization : public Error {
 public:
  explicit NoStabilization(std::vector<int> chi)
      : Error("Euler characteristic did not stabilise on the kappa grid"),
        chi_(std::move(chi)) {}
  const std::vector<int>& chi_sequence() const noexcept { return chi_; }

 private:
  std::vector<int> chi_;
};

}  // namespace levyspec
