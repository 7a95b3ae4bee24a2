#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lexmemm {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed text input (CoNLL-U, lexicon TSV, raw text, reports).
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  explicit ParseError(const std::string& what) : Error(what), line_(0) {}

  // 1-based line number, 0 when not tied to a line.
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Invalid combination of user-supplied settings.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Numerical failure during optimization.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Request rejected because it is too large to serve (brute-force decoding).
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Model file problems. Each load failure mode has its own type.
class ModelFormatError : public Error {
 public:
  using Error::Error;
};
class VersionError : public ModelFormatError {
 public:
  using ModelFormatError::ModelFormatError;
};
class TruncatedFileError : public ModelFormatError {
 public:
  using ModelFormatError::ModelFormatError;
};
class DimensionError : public ModelFormatError {
 public:
  using ModelFormatError::ModelFormatError;
};
class FingerprintMismatchError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace lexmemm
