#include "atlas/core.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace atlas {

const char* error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonFiniteParameter: return "NonFiniteParameter";
    case ErrorCode::OutsideDomain: return "OutsideDomain";
    case ErrorCode::DegenerateParameter: return "DegenerateParameter";
    case ErrorCode::NoCycleFound: return "NoCycleFound";
    case ErrorCode::PeriodCapExceeded: return "PeriodCapExceeded";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DerivativeSingular: return "DerivativeSingular";
    case ErrorCode::OrbitHitPole: return "OrbitHitPole";
    case ErrorCode::NoRootInRange: return "NoRootInRange";
    case ErrorCode::BisectionFailed: return "BisectionFailed";
    case ErrorCode::RefinementDiverged: return "RefinementDiverged";
    case ErrorCode::NotInPetal: return "NotInPetal";
    case ErrorCode::DepthExhausted: return "DepthExhausted";
    case ErrorCode::CuspReached: return "CuspReached";
    case ErrorCode::ContinuationStalled: return "ContinuationStalled";
    case ErrorCode::NotEscaping: return "NotEscaping";
    case ErrorCode::SplitPointsNotFound: return "SplitPointsNotFound";
    case ErrorCode::SeedingFailed: return "SeedingFailed";
    case ErrorCode::AmbiguousTag: return "AmbiguousTag";
    case ErrorCode::OutOfWorld: return "OutOfWorld";
    case ErrorCode::UnknownFigure: return "UnknownFigure";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

long tier_budget(Tier t) {
  switch (t) {
    case Tier::Preview: return 2000;
    case Tier::Standard: return 20000;
    case Tier::Analysis: return 200000;
  }
  return 20000;
}

const char* tier_name(Tier t) {
  switch (t) {
    case Tier::Preview: return "preview";
    case Tier::Standard: return "standard";
    case Tier::Analysis: return "analysis";
  }
  return "standard";
}

Tier parse_tier(const std::string& s) {
  if (s == "preview") return Tier::Preview;
  if (s == "standard" || s.empty()) return Tier::Standard;
  if (s == "analysis") return Tier::Analysis;
  fail(ErrorCode::InvalidArgument, "unknown tier '" + s + "'");
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string format_complex(cplx z) {
  return format_double(z.real()) + "," + format_double(z.imag());
}

static bool parse_one(std::string_view s, double& out) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size() &&
         std::isfinite(out);
}

cplx parse_complex(const std::string& s) {
  auto comma = s.find(',');
  double re = 0, im = 0;
  if (comma == std::string::npos ||
      !parse_one(std::string_view(s).substr(0, comma), re) ||
      !parse_one(std::string_view(s).substr(comma + 1), im))
    fail(ErrorCode::InvalidArgument, "expected RE,IM but got '" + s + "'");
  return {re, im};
}

}  // namespace atlas
