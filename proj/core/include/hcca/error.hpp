#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace hcca {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed trace input; carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& detail) : ParseError({}, line, detail) {}
  ParseError(const std::string& source, std::size_t line, const std::string& detail)
      : Error(format(source, line, detail)), line_(line), detail_(detail) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  static std::string format(const std::string& source, std::size_t line, const std::string& detail)
  {
    std::string out = source;
    if (line) out += (out.empty() ? "line " : ":") + std::to_string(line);
    return out.empty() ? detail : out + ": " + detail;
  }

  std::size_t line_;
  std::string detail_;
};

// Invalid scenario configuration; `field()` names the offending key path.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace hcca
