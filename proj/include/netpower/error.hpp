#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace netpower {

enum class ErrorKind {
  invalid_argument,
  parse,
  duplicate_edge,
  empty_input,
  length_mismatch,
  divergence,
  solver_breakdown,
  structural,
  io,
};

inline constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::parse: return "parse";
    case ErrorKind::duplicate_edge: return "duplicate_edge";
    case ErrorKind::empty_input: return "empty_input";
    case ErrorKind::length_mismatch: return "length_mismatch";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::solver_breakdown: return "solver_breakdown";
    case ErrorKind::structural: return "structural";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace netpower
