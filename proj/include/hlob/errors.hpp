#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hlob {

/// Malformed or inconsistent input data. `line` is 1-based, 0 when unknown.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  [[nodiscard]] std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A simulation could not continue because one side of the book emptied.
class EmptyBookSide : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hlob
