#pragma once

#include <stdexcept>
#include <string>

namespace surfsc {

enum class ErrorKind {
  domain,
  regime,
  solver_failure,
  bracket_failure,
  precondition,
  shape,
  division,
  certificate_failure,
  fit,
  internal,
  io,
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

// Eigensolver or optimizer gave up; carries the last residual or gradient norm.
class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, double residual)
      : Error(ErrorKind::solver_failure, what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::domain: return "domain error";
    case ErrorKind::regime: return "regime error";
    case ErrorKind::solver_failure: return "solver failure";
    case ErrorKind::bracket_failure: return "bracket failure";
    case ErrorKind::precondition: return "precondition error";
    case ErrorKind::shape: return "shape error";
    case ErrorKind::division: return "division error";
    case ErrorKind::certificate_failure: return "certificate failure";
    case ErrorKind::fit: return "fit error";
    case ErrorKind::internal: return "internal error";
    case ErrorKind::io: return "io error";
  }
  return "error";
}

// Reference value of the de Gennes constant, used only for regime guards.
inline constexpr double kTheta0Reference = 0.5901061249;

inline bool in_surface_regime(double b) { return b > 1.0 && b * kTheta0Reference < 1.0; }

}  // namespace surfsc
