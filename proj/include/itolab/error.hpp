#pragma once

#include <stdexcept>
#include <string>

namespace itolab {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adaptive quadrature exhausted its order or depth budget.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// A converted variance came out negative beyond roundoff.
class NegativeVariance : public Error {
 public:
  using Error::Error;
};

class UnsupportedModel : public Error {
 public:
  using Error::Error;
};

class UnknownModel : public Error {
 public:
  using Error::Error;
};

/// An Euler-Maruyama step produced inf/nan.
class NonFiniteState : public Error {
 public:
  using Error::Error;
};

/// Fokker-Planck update produced negative mass beyond the clip threshold or a
/// non-finite cell.
class InstabilityDetected : public Error {
 public:
  using Error::Error;
};

class AutoscaleDiverged : public Error {
 public:
  using Error::Error;
};

/// Operation needs exact polynomial drift/diffusion forms that are absent.
class NonPolynomial : public Error {
 public:
  using Error::Error;
};

class MissingMoment : public Error {
 public:
  using Error::Error;
};

/// Polynomial still carries a free symbol where a number is required.
class UnboundSymbol : public Error {
 public:
  using Error::Error;
};

/// Malformed model description or config text; carries a 1-based position.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace itolab
