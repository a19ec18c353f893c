#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace elicit {

// Raised when an analysis precondition does not hold (empty table, N < 2,
// mismatched joint counts, ...).
class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by the text readers. Line and column are 1-based; 0 means unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string file, std::size_t line, std::size_t column,
             const std::string& message)
      : std::runtime_error(format(file, line, column, message)),
        file_(std::move(file)),
        line_(line),
        column_(column),
        detail_(message) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  static std::string format(const std::string& file, std::size_t line,
                            std::size_t column, const std::string& message) {
    std::string out = file.empty() ? std::string("<input>") : file;
    if (line > 0) {
      out += ":" + std::to_string(line);
      if (column > 0) out += ":" + std::to_string(column);
    }
    return out + ": " + message;
  }

  std::string file_;
  std::size_t line_;
  std::size_t column_;
  std::string detail_;
};

}  // namespace elicit
