#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lfw2vec {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed input. `line()` is 1-based, or 0 when the failure is not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::int64_t line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  std::int64_t line() const noexcept { return line_; }

 private:
  std::int64_t line_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Negative sampling cannot produce a word other than the excluded one.
class DegenerateVocabulary : public Error {
 public:
  DegenerateVocabulary() : Error("degenerate vocabulary") {}
};

/// Non-finite loss or parameter during training.
class TrainingDiverged : public Error {
 public:
  using Error::Error;
};

}  // namespace lfw2vec
