#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dualtable {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller mistakes: unknown tables or columns, type errors, bad literals.
class UserError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// A file failed validation (magic, version, CRC, truncation).
class CorruptionError : public Error {
 public:
  using Error::Error;
};

class ParseError : public UserError {
 public:
  ParseError(std::size_t line, std::size_t column, std::string message,
             std::vector<std::string> expected = {});

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& message() const noexcept { return message_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string message_;
  std::vector<std::string> expected_;
};

}  // namespace dualtable
