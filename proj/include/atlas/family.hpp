#pragma once

#include <string>

#include "atlas/core.hpp"

namespace atlas {

enum class Family { Newton, Antipodal };

const char* family_name(Family f);
Family parse_family(const std::string& s);

struct Parameter {
  Family family = Family::Newton;
  cplx value;
  bool in_u = false;  // Newton only: strict membership in the open region U

  static Parameter newton(cplx a);
  static Parameter antipodal(cplx q);
  static Parameter make(Family f, cplx v);
};

enum class Chart { Finite, Infinity };

// In the Infinity chart, z holds the coordinate w = 1/z (so w = 0 is infinity).
struct SpherePoint {
  Chart chart = Chart::Finite;
  cplx z;

  static SpherePoint finite(cplx z) { return {Chart::Finite, z}; }
  static SpherePoint infinity() { return {Chart::Infinity, 0.0}; }
  bool is_infinity() const { return chart == Chart::Infinity && z == 0.0; }
  // Re-expresses in the chart appropriate to the size of the point.
  SpherePoint normalized() const;
};

inline constexpr double kChartSwitch = 1e8;
inline constexpr double kAlgTol = 1e-10;

struct Evaluation {
  SpherePoint w;
  cplx dw;  // derivative between the input and output charts
};

Evaluation evaluate(const Parameter& p, SpherePoint z);

struct CriticalPair {
  cplx c_plus;
  cplx c_minus;
};

CriticalPair free_critical_points(const Parameter& p);

enum class Region { InU, InConjugateU, Outside };
struct RegionInfo {
  Region region;
  bool on_symmetry_locus;
};
RegionInfo region_membership(cplx a);
const char* region_name(Region r);

struct PoleSet {
  double p_real;
  cplx p_pair;
};
PoleSet newton_poles(cplx a);

SpherePoint involution(const Parameter& p, SpherePoint z);

// Finite-chart kernel used by iteration-heavy code. Values at poles are inf.
struct Map {
  Family family;
  cplx par;     // a or q
  double r, m;  // Newton: Re(a), |a|^2
  cplx qc;      // antipodal: conj(q)

  explicit Map(const Parameter& p);

  cplx operator()(cplx z) const {
    if (family == Family::Newton) {
      cplx z2 = z * z;
      cplx num = ((3.0 * z - 4.0 * r) * z + (m - 1.0)) * z2 + m;
      cplx den = ((4.0 * z - 6.0 * r) * z + 2.0 * (m - 1.0)) * z + 2.0 * r;
      return num / den;
    }
    return z * z * (par - z) / (1.0 + qc * z);
  }

  cplx eval(cplx z, cplx& dz) const {
    if (family == Family::Newton) {
      cplx z2 = z * z;
      cplx num = ((3.0 * z - 4.0 * r) * z + (m - 1.0)) * z2 + m;
      cplx den = ((4.0 * z - 6.0 * r) * z + 2.0 * (m - 1.0)) * z + 2.0 * r;
      // N' = f f'' / f'^2 with f' = den
      cplx f = (((z - 2.0 * r) * z + (m - 1.0)) * z + 2.0 * r) * z - m;
      cplx f2 = (12.0 * z - 12.0 * r) * z + 2.0 * (m - 1.0);
      dz = f * f2 / (den * den);
      return num / den;
    }
    cplx den = 1.0 + qc * z;
    dz = z * (2.0 * par + (m - 3.0) * z - 2.0 * qc * z * z) / (den * den);
    return z * z * (par - z) / den;
  }

  cplx inv(cplx z) const {
    if (family == Family::Newton) return std::conj(z);
    return -1.0 / std::conj(z);
  }

  // n-fold composition with derivative.
  cplx iterate(cplx z, int n, cplx* d = nullptr) const {
    cplx acc = 1.0;
    for (int i = 0; i < n; ++i) {
      cplx dz;
      z = eval(z, dz);
      acc *= dz;
    }
    if (d) *d = acc;
    return z;
  }
};

// Quartic-family polynomial helpers (also used by tests as a cross-check).
cplx newton_f(cplx a, cplx z);
cplx newton_fprime(cplx a, cplx z);

}  // namespace atlas
