#pragma once

#include <stdexcept>
#include <string>

namespace homokinetics {

/// Invalid input data: bad scenario, out-of-range argument, inconsistent
/// configuration. Surfaces as exit code 2 from the CLI.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation that was set up correctly but could not be carried out.
/// Surfaces as exit code 3 from the CLI.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define HOMOKINETICS_ERROR(Name, Base)        \
  class Name : public Base {                  \
   public:                                    \
    explicit Name(const std::string& what)    \
        : Base(std::string(#Name ": ") + what) \
    {}                                        \
  };

HOMOKINETICS_ERROR(DomainError, ConfigError)
HOMOKINETICS_ERROR(DegenerateFlow, ConfigError)
HOMOKINETICS_ERROR(FiniteHorizon, ConfigError)
HOMOKINETICS_ERROR(CompatibilityError, ConfigError)
HOMOKINETICS_ERROR(MissingB, ConfigError)
HOMOKINETICS_ERROR(RegimeMismatch, ConfigError)
HOMOKINETICS_ERROR(UnclassifiableFlow, NumericalError)
HOMOKINETICS_ERROR(MajorantViolation, NumericalError)
HOMOKINETICS_ERROR(QuadratureBudgetExceeded, NumericalError)
HOMOKINETICS_ERROR(StiffnessFailure, NumericalError)
HOMOKINETICS_ERROR(InsufficientData, NumericalError)
HOMOKINETICS_ERROR(NonPositiveValues, NumericalError)

#undef HOMOKINETICS_ERROR

}  // namespace homokinetics
