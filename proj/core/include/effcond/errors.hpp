#pragma once

#include <stdexcept>
#include <string>

namespace effcond {

// Validation errors map to CLI exit code 1, numeric failures to 2.
enum class ErrorKind { Validation, Numeric };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string name, const std::string &detail);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string &name() const noexcept { return name_; }

private:
  ErrorKind kind_;
  std::string name_;
};

#define EFFCOND_DECLARE_ERROR(Name, Kind)                                      \
  class Name : public Error {                                                  \
  public:                                                                      \
    explicit Name(const std::string &detail)                                   \
        : Error(ErrorKind::Kind, #Name, detail) {}                             \
  };

EFFCOND_DECLARE_ERROR(ReflectionSymmetryViolated, Validation)
EFFCOND_DECLARE_ERROR(DegeneratePhase, Validation)
EFFCOND_DECLARE_ERROR(DimensionMismatch, Validation)
EFFCOND_DECLARE_ERROR(InadmissiblePair, Validation)
EFFCOND_DECLARE_ERROR(ParseError, Validation)
EFFCOND_DECLARE_ERROR(SubspaceTooSmall, Validation)
EFFCOND_DECLARE_ERROR(RepInvalid, Validation)
EFFCOND_DECLARE_ERROR(ConstraintViolated, Validation)
EFFCOND_DECLARE_ERROR(BudgetExceeded, Validation)
EFFCOND_DECLARE_ERROR(NonConvergence, Numeric)
EFFCOND_DECLARE_ERROR(EigSolverFailure, Numeric)
EFFCOND_DECLARE_ERROR(SingularResolvent, Numeric)
EFFCOND_DECLARE_ERROR(SingularA, Numeric)
EFFCOND_DECLARE_ERROR(IllConditionedFit, Numeric)
EFFCOND_DECLARE_ERROR(ModeCountMismatch, Numeric)
EFFCOND_DECLARE_ERROR(ClosureFailure, Numeric)

#undef EFFCOND_DECLARE_ERROR

class AssumptionViolated : public Error {
public:
  AssumptionViolated(int which, const std::string &detail)
      : Error(ErrorKind::Numeric, "AssumptionViolated",
              "assumption " + std::to_string(which) + ": " + detail),
        which_(which) {}
  int which() const noexcept { return which_; }

private:
  int which_;
};

class SingularStep : public Error {
public:
  SingularStep(int step, const std::string &detail)
      : Error(ErrorKind::Numeric, "SingularStep",
              "step " + std::to_string(step) + ": " + detail),
        step_(step) {}
  int step() const noexcept { return step_; }

private:
  int step_;
};

} // namespace effcond
