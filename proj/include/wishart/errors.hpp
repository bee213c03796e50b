#pragma once

#include <stdexcept>
#include <string>

namespace wishart {

/// Base of every error raised by the library. `kind()` is a stable
/// machine-readable tag used by the CLI's JSON error output.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define WISHART_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                        \
   public:                                                           \
    explicit Name(const std::string& message) : Error(#Name, message) {} \
  };

WISHART_DEFINE_ERROR(InvalidArgument)
WISHART_DEFINE_ERROR(NonPositiveEigenvalue)
WISHART_DEFINE_ERROR(DegenerateSpectrum)
WISHART_DEFINE_ERROR(DimensionError)
WISHART_DEFINE_ERROR(RealCaseTooSmallN)
WISHART_DEFINE_ERROR(IndexError)
WISHART_DEFINE_ERROR(QuadratureNonConvergence)
WISHART_DEFINE_ERROR(JacobiNonConvergence)
WISHART_DEFINE_ERROR(InputError)

#undef WISHART_DEFINE_ERROR

}  // namespace wishart
