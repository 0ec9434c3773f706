#pragma once

#include <stdexcept>
#include <string>

namespace cuspwave {

enum class ErrorKind {
  InvalidArgument,
  Overflow,
  NonPositiveR,
  BlowUp,
  SupportViolation,
  GateRejected,
  DegenerateConstraintSystem,
  InsufficientSpan,
  Parse,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::NonPositiveR: return "NonPositiveR";
    case ErrorKind::BlowUp: return "BlowUp";
    case ErrorKind::SupportViolation: return "SupportViolation";
    case ErrorKind::GateRejected: return "GateRejected";
    case ErrorKind::DegenerateConstraintSystem: return "DegenerateConstraintSystem";
    case ErrorKind::InsufficientSpan: return "InsufficientSpan";
    case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

}  // namespace cuspwave
