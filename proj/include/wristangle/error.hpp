#pragma once

#include <stdexcept>
#include <string>

namespace wristangle {

// Failure categories. The CLI maps each to a distinct process exit code.
enum class ErrorKind {
  InvalidArgument,   // rejected input (shape, range, non-finite)
  Config,            // unknown key, bad value in a config file
  Parse,             // malformed replay/CSV line
  InsufficientData,  // stream too short for calibration / initialization
  Conditioning,      // numerically singular system
  ModelMismatch,     // model dimensions do not fit the data
  Decode,            // malformed or truncated model bytes
  UnsupportedVersion,
  Ordering,          // timestamp regression within a stream
  NoEstimates,
  NoOverlap,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Parse error that remembers which line of the input failed (1-based, 0 if unknown).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorKind::Parse,
              line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

const char* to_string(ErrorKind kind) noexcept;

}  // namespace wristangle
