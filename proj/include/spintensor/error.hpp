#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spintensor {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Index-structure violation (triple occurrence, same-variance pair, free-index mismatch).
class IndexError : public Error {
 public:
  using Error::Error;
};

/// Bad tensor or scalar declaration, or reference to an unknown symbol.
class SymbolError : public Error {
 public:
  using Error::Error;
};

/// Arithmetic failure in the coefficient field (division by zero, unassigned scalar).
class ArithmeticError : public Error {
 public:
  using Error::Error;
};

/// Half-open byte range [begin, end) into a source text.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, Span span)
      : Error(message + " at bytes [" + std::to_string(span.begin) + ", " +
              std::to_string(span.end) + ")"),
        span_(span) {}

  [[nodiscard]] Span span() const { return span_; }

 private:
  Span span_;
};

/// A derivation step could not be carried out (symbol absent, non-invertible pivot, ...).
class DerivationError : public Error {
 public:
  using Error::Error;
};

class OracleError : public Error {
 public:
  using Error::Error;
};

}  // namespace spintensor
