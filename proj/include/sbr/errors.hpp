#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sbr {

// Base of every error raised by the library. The CLI maps the subclasses
// onto exit codes (config 1, data 2, I/O 3).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DuplicateIdError : public DataError {
 public:
  explicit DuplicateIdError(std::string id)
      : DataError("duplicate report id '" + id + "'"), id_(std::move(id)) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

class StratificationError : public DataError {
 public:
  using DataError::DataError;
};

class DegenerateTrainingError : public DataError {
 public:
  using DataError::DataError;
};

class DimensionError : public DataError {
 public:
  using DataError::DataError;
};

class VersionError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace sbr
