#pragma once

#include <stdexcept>
#include <string>

namespace freeprob {

// Failure categories line up with the CLI exit contract:
// parse -> 2, numeric domain -> 3, violated precondition -> 4.
// A certified negative verdict is not an error; certifiers return reports.
enum class ErrorKind { Parse, NumericDomain, Precondition };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

#define FREEPROB_DEFINE_ERROR(Name, Kind) \
  class Name : public Error { \
  public: \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, std::string(#Name) + ": " + what) {} \
  }

FREEPROB_DEFINE_ERROR(ParseError, Parse);
FREEPROB_DEFINE_ERROR(DimensionMismatch, Precondition);
FREEPROB_DEFINE_ERROR(NotNormalized, Precondition);
FREEPROB_DEFINE_ERROR(SingularLeadingTerm, Precondition);
FREEPROB_DEFINE_ERROR(InsufficientOrder, Precondition);
FREEPROB_DEFINE_ERROR(UnknownFixture, Precondition);
FREEPROB_DEFINE_ERROR(NotCP, Precondition);
FREEPROB_DEFINE_ERROR(NotInfinitelyDivisible, Precondition);
FREEPROB_DEFINE_ERROR(SelfAdjointnessViolated, Precondition);
FREEPROB_DEFINE_ERROR(NonSelfAdjointAlpha, Precondition);
FREEPROB_DEFINE_ERROR(CertificateFailed, Precondition);

FREEPROB_DEFINE_ERROR(DomainError, NumericDomain);
FREEPROB_DEFINE_ERROR(SingularValue, NumericDomain);
FREEPROB_DEFINE_ERROR(SingularResolvent, NumericDomain);
FREEPROB_DEFINE_ERROR(SingularDerivative, NumericDomain);
FREEPROB_DEFINE_ERROR(OutsideConvergence, NumericDomain);
FREEPROB_DEFINE_ERROR(NoContraction, NumericDomain);
FREEPROB_DEFINE_ERROR(MaxIterations, NumericDomain);

#undef FREEPROB_DEFINE_ERROR

}  // namespace freeprob
