#pragma once

#include <stdexcept>
#include <string>

namespace castl {

struct SourceLocation {
  int line = 0;
  int column = 0;

  std::string str() const { return std::to_string(line) + ":" + std::to_string(column); }
  bool operator==(const SourceLocation&) const = default;
};

/// Base class for every error the toolkit reports to callers.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Syntax or semantic error tied to a position in some source text.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, SourceLocation loc)
      : Error(loc.line > 0 ? loc.str() + ": " + message : message), message_(message), loc_(loc) {}

  const std::string& message() const { return message_; }
  SourceLocation location() const { return loc_; }

 private:
  std::string message_;
  SourceLocation loc_;
};

/// An input is well formed but inconsistent with the domain or scene
/// (unknown object, arity mismatch, unknown attribute, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace castl
