#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace atlas {

using cplx = std::complex<double>;

enum class ErrorCode {
  InvalidArgument,
  NonFiniteParameter,
  OutsideDomain,
  DegenerateParameter,
  NoCycleFound,
  PeriodCapExceeded,
  NoConvergence,
  DerivativeSingular,
  OrbitHitPole,
  NoRootInRange,
  BisectionFailed,
  RefinementDiverged,
  NotInPetal,
  DepthExhausted,
  CuspReached,
  ContinuationStalled,
  NotEscaping,
  SplitPointsNotFound,
  SeedingFailed,
  AmbiguousTag,
  OutOfWorld,
  UnknownFigure,
  Io,
  Internal,
};

const char* error_name(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode c, const std::string& msg) {
  throw Error(c, std::string(error_name(c)) + ": " + msg);
}

// Iteration budgets per tier.
enum class Tier { Preview, Standard, Analysis };
long tier_budget(Tier t);
const char* tier_name(Tier t);
Tier parse_tier(const std::string& s);

// "re,im" on the wire.
std::string format_complex(cplx z);
cplx parse_complex(const std::string& s);
std::string format_double(double x);

}  // namespace atlas
