#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace elkg {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// An argument violated a documented precondition or record invariant.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// Error tied to a position in some source text (Turtle, SPARQL).
class PositionedError : public Error {
public:
  PositionedError(const std::string& kind, std::size_t line, std::size_t column,
                  const std::string& detail)
      : Error(kind + " at line " + std::to_string(line) + ", column " +
              std::to_string(column) + ": " + detail),
        line_(line),
        column_(column),
        detail_(detail) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }
  [[nodiscard]] std::size_t column() const noexcept { return column_; }
  [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

private:
  std::size_t line_;
  std::size_t column_;
  std::string detail_;
};

}  // namespace elkg
