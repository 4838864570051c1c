#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mcc {

/// Failure categories shared by every module. The C API maps each one to a
/// distinct status code.
enum class ErrorKind {
  domain,      // input outside the operation's domain (empty set, n < 2, ...)
  dimension,   // length / shape mismatch
  constraint,  // parameter combination that admits no solution
  parse,       // malformed file content
  version,     // wrong magic bytes or unsupported format version
  io,          // file cannot be opened / written
  config,      // inconsistent configuration
  bounds,      // window or index outside a recording
  internal,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Parse failure carrying the location that triggered it. `location` is a
/// 1-based line number for text formats and a byte offset for binary ones.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t location)
      : Error(ErrorKind::parse, what), location_(location) {}

  std::size_t location() const noexcept { return location_; }

 private:
  std::size_t location_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace mcc
