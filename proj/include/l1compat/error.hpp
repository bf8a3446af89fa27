#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace l1c {

enum class ErrorKind {
  Syntax,
  NonHomogeneousRow,
  UnknownComponent,
  DimensionMismatch,
  DuplicateBlock,
  NotElliptic,
  NotHomogeneous,
  OrderTooLow,
  QuadratureNotConverged,
  NearSingularSymbol,
  HypothesisFailed,
  EpsilonTooSmall,
  ResidualTooLarge,
  InvalidArgument,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Syntax: return "SyntaxError";
    case ErrorKind::NonHomogeneousRow: return "NonHomogeneousRow";
    case ErrorKind::UnknownComponent: return "UnknownComponent";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DuplicateBlock: return "DuplicateBlock";
    case ErrorKind::NotElliptic: return "NotElliptic";
    case ErrorKind::NotHomogeneous: return "NotHomogeneous";
    case ErrorKind::OrderTooLow: return "OrderTooLow";
    case ErrorKind::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorKind::NearSingularSymbol: return "NearSingularSymbol";
    case ErrorKind::HypothesisFailed: return "HypothesisFailed";
    case ErrorKind::EpsilonTooSmall: return "EpsilonTooSmall";
    case ErrorKind::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Error";
}

// Every failure in the library is an Error tagged with its kind. `line` is the
// 1-based source line for parse errors and 0 otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, int line = 0)
      : std::runtime_error(format(kind, what, line)), kind_(kind), line_(line) {}

  ErrorKind kind() const noexcept { return kind_; }
  int line() const noexcept { return line_; }

 private:
  static std::string format(ErrorKind kind, const std::string& what, int line) {
    std::string out(to_string(kind));
    if (line > 0) out += " (line " + std::to_string(line) + ")";
    out += ": ";
    out += what;
    return out;
  }

  ErrorKind kind_;
  int line_;
};

}  // namespace l1c
