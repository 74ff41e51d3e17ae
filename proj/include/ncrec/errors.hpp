// Error taxonomy shared by all ncrec components.
#pragma once

#include <stdexcept>
#include <string>

namespace ncrec {

enum class ErrorKind {
  IndexOutOfRange,
  FirstRowNonzero,
  DuplicatePair,
  DegenerateTheta,
  DomainError,
  NonpositiveP1,
  DivisionByZero,
  SingularJacobian,
  NewtonDivergence,
  StepUnderflow,
  SyntaxError,
  UnknownKey,
  DuplicateKey,
  InvalidValue,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::IndexOutOfRange:  return "IndexOutOfRange";
    case ErrorKind::FirstRowNonzero:  return "FirstRowNonzero";
    case ErrorKind::DuplicatePair:    return "DuplicatePair";
    case ErrorKind::DegenerateTheta:  return "DegenerateTheta";
    case ErrorKind::DomainError:      return "DomainError";
    case ErrorKind::NonpositiveP1:    return "NonpositiveP1";
    case ErrorKind::DivisionByZero:   return "DivisionByZero";
    case ErrorKind::SingularJacobian: return "SingularJacobian";
    case ErrorKind::NewtonDivergence: return "NewtonDivergence";
    case ErrorKind::StepUnderflow:    return "StepUnderflow";
    case ErrorKind::SyntaxError:      return "SyntaxError";
    case ErrorKind::UnknownKey:       return "UnknownKey";
    case ErrorKind::DuplicateKey:     return "DuplicateKey";
    case ErrorKind::InvalidValue:     return "InvalidValue";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ncrec
