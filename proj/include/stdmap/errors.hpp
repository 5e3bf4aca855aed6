#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace stdmap {

// Base of every error raised by the library.  All of them signal a violated
// precondition or an exhausted numerical budget; none is recoverable inside
// the call that raised it.
class Error : public std::runtime_error {
 public:
  Error(const char* kind, const std::string& what)
      : std::runtime_error(std::string(kind) + ": " + what), kind_(kind) {}
  [[nodiscard]] const char* kind() const noexcept { return kind_; }

 private:
  const char* kind_;
};

#define STDMAP_DEFINE_ERROR(Name)                                      \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& what) : Error(#Name, what) {}     \
  };

STDMAP_DEFINE_ERROR(PrecisionDomainExceeded)
STDMAP_DEFINE_ERROR(InvalidArgument)
STDMAP_DEFINE_ERROR(StripDegenerate)
STDMAP_DEFINE_ERROR(ZeroVector)
STDMAP_DEFINE_ERROR(ApertureDomain)
STDMAP_DEFINE_ERROR(DomainError)
STDMAP_DEFINE_ERROR(BracketError)
STDMAP_DEFINE_ERROR(StripOverlap)
STDMAP_DEFINE_ERROR(InvariantViolation)
STDMAP_DEFINE_ERROR(BudgetExceeded)
STDMAP_DEFINE_ERROR(QuadratureFailure)
STDMAP_DEFINE_ERROR(ResolutionExceeded)
STDMAP_DEFINE_ERROR(NotMeanZero)
STDMAP_DEFINE_ERROR(EmptySample)

#undef STDMAP_DEFINE_ERROR

// Compact number formatting for messages.
inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace stdmap
