#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace depthfuse {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Pose detection failed for the frame (KeypointFrame::valid == false).
class InvalidFrameError : public Error {
 public:
  using Error::Error;
};

// A model was evaluated outside its mathematical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A value falls outside a representable or physical range.
class OutOfRangeError : public Error {
 public:
  using Error::Error;
};

// Not enough samples to form a derivative.
class InsufficientHistoryError : public Error {
 public:
  using Error::Error;
};

// No strictly positive depth pixel was found along the sampled line.
class NoValidPixelsError : public Error {
 public:
  using Error::Error;
};

// A configuration object violates its invariants.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Timestamps went backwards (or did not advance) at `index`.
class NonMonotoneTimestampError : public Error {
 public:
  NonMonotoneTimestampError(std::size_t index, const std::string& what)
      : Error(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

// Input text could not be parsed; `line` is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace depthfuse
