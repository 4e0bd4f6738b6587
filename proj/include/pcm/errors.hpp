#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pcm {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Input text could not be turned into a matrix grid at all
/// (non-square shape, unreadable token, non-positive value).
class ParseError : public Error {
public:
  ParseError(std::string message, int row, int col)
      : Error(std::move(message)), row_(row), col_(col) {}
  explicit ParseError(std::string message) : Error(std::move(message)) {}

  int row() const noexcept { return row_; }  // 1-based, 0 = whole input
  int col() const noexcept { return col_; }

private:
  int row_ = 0;
  int col_ = 0;
};

/// A structurally readable grid violated matrix invariants
/// (diagonal, reciprocity, symmetric missingness).
class ValidationFailure : public Error {
public:
  using Error::Error;
};

/// Operation requires a complete matrix but some entries are missing.
class IncompleteMatrixError : public Error {
public:
  IncompleteMatrixError() : Error("matrix is incomplete") {}
  using Error::Error;
};

/// Operation requires a connected comparison graph.
class DisconnectedGraphError : public Error {
public:
  DisconnectedGraphError() : Error("comparison graph is not connected") {}
  using Error::Error;
};

/// Spanning-tree enumeration refused because the exact tree count
/// exceeds the configured cap. Carries the count so callers can decide
/// whether to retry with a higher cap.
class TreeCountExceedsCapError : public Error {
public:
  TreeCountExceedsCapError(std::uint64_t count, std::uint64_t cap)
      : Error("spanning tree count " + std::to_string(count) +
              " exceeds cap " + std::to_string(cap)),
        count_(count), cap_(cap) {}

  std::uint64_t count() const noexcept { return count_; }
  std::uint64_t cap() const noexcept { return cap_; }

private:
  std::uint64_t count_;
  std::uint64_t cap_;
};

/// Two vectors that must have equal length do not.
class LengthMismatchError : public Error {
public:
  LengthMismatchError(std::size_t a, std::size_t b)
      : Error("length mismatch: " + std::to_string(a) + " vs " +
              std::to_string(b)) {}
};

/// Iterative solver failed to reach its stopping criterion.
class NonConvergenceError : public Error {
public:
  using Error::Error;
};

/// Index requires at least three alternatives.
class TooSmallError : public Error {
public:
  using Error::Error;
};

/// A spanning tree references a pair whose comparison is missing.
class EdgeNotInMatrixError : public Error {
public:
  using Error::Error;
};

}  // namespace pcm
