#pragma once

#include <stdexcept>
#include <string>

namespace edstereo {

enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  Io,
  Format,
  Numeric,
};

/// Base exception for the library. The kind drives CLI exit codes.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::DimensionMismatch: return "dimension mismatch";
    case ErrorKind::Io: return "i/o error";
    case ErrorKind::Format: return "format error";
    case ErrorKind::Numeric: return "numeric error";
  }
  return "error";
}

}  // namespace edstereo
