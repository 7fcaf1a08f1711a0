#pragma once

#include <random>

#include "atlas/family.hpp"

namespace testing_support {

// a2 recomputed from the center search in the orbit tests; this literal only
// seeds fixtures that do not depend on its last digits
inline const atlas::cplx kA2{0.0, 4.63343045134138};
inline const atlas::cplx kTongue{0.0, 3.0};

inline std::mt19937_64& rng() {
  static std::mt19937_64 g(7);
  return g;
}

inline atlas::cplx uniform_point(double lo_re, double hi_re, double lo_im, double hi_im) {
  std::uniform_real_distribution<double> a(lo_re, hi_re), b(lo_im, hi_im);
  return {a(rng()), b(rng())};
}

}  // namespace testing_support
