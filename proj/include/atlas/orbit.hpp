#pragma once

#include <optional>
#include <string>
#include <vector>

#include "atlas/family.hpp"

namespace atlas {

struct Cycle {
  std::vector<cplx> points;
  int period = 0;
  cplx multiplier;  // of the holomorphic return map
  bool self_symmetric = false;
};

// Attracting targets of the free critical orbit.
enum class Target { One, MinusOne, A, ABar, Zero, Infinity };
const char* target_name(Target t);

enum class VerdictKind { FixedBasin, AttractingCycle, Undecided };
enum class ComponentKind { Principal, Capture, Mandelbrot, Tricorn, Unknown };

struct Classification {
  VerdictKind kind = VerdictKind::Undecided;
  Target target = Target::One;  // FixedBasin
  bool immediate = false;       // FixedBasin
  Cycle cycle;                  // AttractingCycle
  long budget_spent = 0;
  ComponentKind component = ComponentKind::Unknown;
  int component_period = 0;  // n for Mandelbrot(n), 2n for Tricorn(2n)

  std::string verdict_string() const;
  std::string component_string() const;
  bool decided() const { return kind != VerdictKind::Undecided; }
};

struct Tolerances {
  double attract = 1e-8;     // fixed-point capture radius
  double near_return = 1e-6;
  double residual = 1e-12;
  double symmetry = 1e-8;
  int period_cap = 64;
};

enum class ImmediacyTest { Fast, Thorough };

Classification classify(const Parameter& p, long budget,
                        const Tolerances& tol = {},
                        ImmediacyTest imm = ImmediacyTest::Fast);

// Classification starting from an arbitrary point rather than c_plus.
Classification classify_point(const Parameter& p, cplx start, long budget,
                              const Tolerances& tol = {},
                              ImmediacyTest imm = ImmediacyTest::Fast);

struct RefineResult {
  cplx z;
  cplx multiplier;
  int steps;
  std::vector<double> residuals;
};

RefineResult refine_periodic(const Map& f, cplx z0, int p, double tol = 1e-12);

Cycle detect_cycle(const Map& f, const std::vector<cplx>& tail,
                   const Tolerances& tol = {});

// Minimal period of a refined periodic point.
int minimal_period(const Map& f, cplx z, int p, double tol = 1e-10);

bool cycle_self_symmetric(const Map& f, const std::vector<cplx>& pts, double tol);

struct CenterSearchReport {
  std::vector<cplx> centers;
  std::vector<double> pole_hits;  // t samples skipped
  std::vector<cplx> rejected;     // roots whose verdict was not Tricorn(2n)
};

CenterSearchReport center_search_newton(int n, double t_lo, double t_hi,
                                        int samples = 20000);

struct AntipodalSearchReport {
  std::vector<cplx> centers;
  int dropped = 0;
  std::vector<cplx> rejected;
};

// Damped Newton for f^r(c_plus) = c_minus in the parameter, from a seed.
std::optional<cplx> refine_center(Family fam, cplx seed, int r);

AntipodalSearchReport center_search_antipodal(int r,
                                              const std::vector<cplx>& seeds);
std::vector<cplx> default_antipodal_seeds();

// Residual of the center condition at a Newton parameter on the symmetry locus.
double newton_center_residual(cplx a, int n);
double antipodal_center_residual(cplx q, int r);

// Attracting fixed points of the family (excluding infinity for Newton).
std::vector<std::pair<Target, cplx>> fixed_targets(const Parameter& p);

}  // namespace atlas
