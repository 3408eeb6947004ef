#pragma once

#include <stdexcept>
#include <string>

namespace axiflow {

/// Base of every error raised by the library. `code()` is the stable
/// identifier used in reports and for CLI exit-status mapping.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define AXIFLOW_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                        \
   public:                                                           \
    explicit Name(const std::string& what) : Error(#Name, what) {}   \
  };

// speeds
AXIFLOW_DEFINE_ERROR(DomainError)
AXIFLOW_DEFINE_ERROR(NonPositive)
AXIFLOW_DEFINE_ERROR(BadParam)
// curvature_algebra
AXIFLOW_DEFINE_ERROR(NoRoot)
AXIFLOW_DEFINE_ERROR(DegeneratePoint)
AXIFLOW_DEFINE_ERROR(OffLocus)
// profile
AXIFLOW_DEFINE_ERROR(DegenerateMesh)
AXIFLOW_DEFINE_ERROR(PastSingular)
// solver
AXIFLOW_DEFINE_ERROR(ConeExit)
AXIFLOW_DEFINE_ERROR(NumericalBlowup)
// monitors / ovaloid
AXIFLOW_DEFINE_ERROR(InsufficientData)
AXIFLOW_DEFINE_ERROR(NoEccentricTime)
AXIFLOW_DEFINE_ERROR(NotRound)
// cli
AXIFLOW_DEFINE_ERROR(ConfigError)

#undef AXIFLOW_DEFINE_ERROR

}  // namespace axiflow
