#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "atlas/orbit.hpp"

namespace atlas {

// Attracting Fatou coordinate of a germ F(z1 + w) = z1 + w + A w^2 + ... built
// from an asymptotic expansion in u = -1/(A w).
class AttractingCoordinate {
 public:
  // jet: Taylor coefficients of F at z1 (jet[1] assumed 1).
  AttractingCoordinate(cplx z1, const std::vector<cplx>& jet,
                       std::function<cplx(cplx)> step, double u_min = 64.0,
                       int terms = 12);

  cplx raw(cplx z, int* depth = nullptr) const;  // psi_0
  cplx phi(cplx u) const;                       // asymptotic part
  cplx local_u(cplx z) const { return -1.0 / (A * (z - z1)); }

  cplx z1, A, B, b;
  std::vector<cplx> d;
  double u_min;
  int max_steps = 400000;

 private:
  std::function<cplx(cplx)> F;
};

enum class PetalKind { Simple, Cusp };
const char* petal_name(PetalKind k);

struct FatouNormalization {
  cplx beta;
  double shift = 0.0;  // psi = psi_0 + i*shift
  int depth = 0;
};

struct ParabolicDatum {
  Parameter param;
  int period = 0;  // 2n
  cplx parabolic_point;
  std::vector<cplx> cycle;
  PetalKind petal_kind = PetalKind::Simple;
  cplx A, b, B;
  double multiplier_residual = 0.0;
  double u_min = 64.0;
  std::vector<cplx> jet;
  FatouNormalization norm;

  int half() const { return period / 2; }
  cplx sigma(cplx z) const;         // antiholomorphic half-return
  cplx ret(cplx z) const;           // holomorphic return map
  AttractingCoordinate coordinate(double u_scale = 1.0) const;
};

// Builds a datum from a parabolic parameter and its characteristic point.
ParabolicDatum make_datum(const Parameter& p, cplx z1, int period,
                          double u_min = 64.0);

ParabolicDatum find_boundary_parabolic(const Parameter& center, cplx direction,
                                       int period);

struct FatouValue {
  cplx psi;
  FatouNormalization norm;
};

FatouValue attracting_fatou_coordinate(const ParabolicDatum& d, cplx z,
                                       double u_scale = 1.0);

struct EcalleSample {
  cplx param;
  double h = 0.0;
  double multiplier_residual = 0.0;
  PetalKind petal_kind = PetalKind::Simple;
};

enum class CriticalChoice { Plus, Minus };
EcalleSample critical_ecalle_height(const ParabolicDatum& d,
                                    CriticalChoice which = CriticalChoice::Plus,
                                    double u_scale = 1.0);

struct ArcTrace {
  std::vector<EcalleSample> samples;  // in the order of the requested targets
  std::vector<ParabolicDatum> data;
  std::vector<EcalleSample> path;     // every accepted continuation point
  bool cusp_reached = false;
  bool stalled = false;
};

ArcTrace trace_arc(const ParabolicDatum& start, const std::vector<double>& targets);

// Arc point near the chord position a + s (b - a), corrected back onto the arc.
std::optional<ParabolicDatum> arc_point_between(const ParabolicDatum& a,
                                                const ParabolicDatum& b, double s);

struct PhaseSample {
  cplx param;
  long escape_time = 0;
  double lifted_phase = 0.0;
  double transit_height = 0.0;
  double incoming_height = 0.0;
};

PhaseSample repelling_fatou_and_phase(cplx param, const ParabolicDatum& ref);

// Unit normal to the arc through d in the parameter plane, pointing out of the
// component.
cplx arc_normal(const ParabolicDatum& d);

// Degeneracy measure |B/A^2| of the simple-parabolic fit.
double cusp_indicator(const ParabolicDatum& d);

}  // namespace atlas
