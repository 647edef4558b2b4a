#pragma once

#include <stdexcept>
#include <string>

namespace ctxkit {

enum class ErrorKind {
  DegenerateScenario,
  InvalidScenario,
  InvalidModel,
  NotInContext,
  EnumerationGuard,
  SolverFailure,
  InvalidArgument,
  DegeneratePrediction,
  Saturation,
  UndefinedStatistic,
  Parse,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateScenario: return "degenerate-scenario";
    case ErrorKind::InvalidScenario: return "invalid-scenario";
    case ErrorKind::InvalidModel: return "invalid-model";
    case ErrorKind::NotInContext: return "not-in-context";
    case ErrorKind::EnumerationGuard: return "enumeration-guard";
    case ErrorKind::SolverFailure: return "solver-failure";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::DegeneratePrediction: return "degenerate-prediction";
    case ErrorKind::Saturation: return "saturation";
    case ErrorKind::UndefinedStatistic: return "undefined-statistic";
    case ErrorKind::Parse: return "parse";
  }
  return "unknown";
}

/// Every failure raised by the library carries a kind so callers (and the
/// batch pipeline's error column) can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ctxkit
