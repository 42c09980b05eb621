#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace sfwi {

enum class ErrorCode {
  InvalidArgument,
  Domain,
  Parse,
  Io,
  NotFound,
  Internal,
};

const char* to_string(ErrorCode code) noexcept;

// Single exception type for the library. `field` names the offending input
// (request parameter, CSV column) when there is one; `line`/`column` are
// 1-based and zero when unknown.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string field = {})
      : std::runtime_error(message), code_(code), field_(std::move(field)) {}

  static Error parse(const std::string& message, std::size_t line, std::size_t column = 0,
                     std::string field = {}) {
    Error e(ErrorCode::Parse, message, std::move(field));
    e.line_ = line;
    e.column_ = column;
    return e;
  }

  ErrorCode code() const noexcept { return code_; }
  const std::string& field() const noexcept { return field_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  ErrorCode code_;
  std::string field_;
  std::size_t line_ = 0;
  std::size_t column_ = 0;
};

}  // namespace sfwi
