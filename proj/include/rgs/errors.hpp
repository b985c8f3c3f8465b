#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rgs {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A binary32 rounding produced an infinity from a finite operand.
class OverflowError : public Error {
 public:
  using Error::Error;
};

class RankDeficientError : public Error {
 public:
  using Error::Error;
};

/// Gram-Schmidt breakdown: the projected column vanished to roundoff level.
class BreakdownError : public Error {
 public:
  BreakdownError(std::ptrdiff_t column, double r_ii, double threshold)
      : Error("breakdown at column " + std::to_string(column) + ": r_ii=" +
              std::to_string(r_ii) + " <= " + std::to_string(threshold)),
        column_(column) {}

  /// Zero-based index of the offending column.
  std::ptrdiff_t column() const noexcept { return column_; }

 private:
  std::ptrdiff_t column_;
};

/// ILU(0) met a (near) zero pivot.
class PivotError : public Error {
 public:
  PivotError(std::ptrdiff_t row, double pivot)
      : Error("zero pivot in row " + std::to_string(row) + " (" +
              std::to_string(pivot) + ")"),
        row_(row) {}
  std::ptrdiff_t row() const noexcept { return row_; }

 private:
  std::ptrdiff_t row_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public IoError {
 public:
  using IoError::IoError;
};

}  // namespace rgs
