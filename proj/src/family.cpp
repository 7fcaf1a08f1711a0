#include "atlas/family.hpp"

#include <cmath>

namespace atlas {

const char* family_name(Family f) {
  return f == Family::Newton ? "newton" : "antipodal";
}

Family parse_family(const std::string& s) {
  if (s == "newton") return Family::Newton;
  if (s == "antipodal") return Family::Antipodal;
  fail(ErrorCode::InvalidArgument, "unknown family '" + s + "'");
}

static bool finite(cplx z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

Parameter Parameter::newton(cplx a) {
  Parameter p;
  p.family = Family::Newton;
  p.value = a;
  p.in_u = finite(a) && region_membership(a).region == Region::InU;
  return p;
}

Parameter Parameter::antipodal(cplx q) {
  Parameter p;
  p.family = Family::Antipodal;
  p.value = q;
  p.in_u = false;
  return p;
}

Parameter Parameter::make(Family f, cplx v) {
  return f == Family::Newton ? newton(v) : antipodal(v);
}

const char* region_name(Region r) {
  switch (r) {
    case Region::InU: return "InU";
    case Region::InConjugateU: return "InConjugateU";
    case Region::Outside: return "Outside";
  }
  return "Outside";
}

RegionInfo region_membership(cplx a) {
  double x = a.real(), y = a.imag();
  bool ineq = 2.0 * y * y - x * x - 2.0 > 0.0;
  Region r = Region::Outside;
  if (ineq && y > 0) r = Region::InU;
  if (ineq && y < 0) r = Region::InConjugateU;
  return {r, r == Region::InU && x == 0.0};
}

SpherePoint SpherePoint::normalized() const {
  if (chart == Chart::Finite && std::abs(z) > kChartSwitch)
    return {Chart::Infinity, 1.0 / z};
  if (chart == Chart::Infinity && z != 0.0 && std::abs(z) >= 1.0)
    return {Chart::Finite, 1.0 / z};
  return *this;
}

Map::Map(const Parameter& p) : family(p.family), par(p.value) {
  r = p.value.real();
  m = std::norm(p.value);
  qc = std::conj(p.value);
}

cplx newton_f(cplx a, cplx z) {
  return (z * z - 1.0) * (z - a) * (z - std::conj(a));
}

cplx newton_fprime(cplx a, cplx z) {
  double r = a.real(), m = std::norm(a);
  return ((4.0 * z - 6.0 * r) * z + 2.0 * (m - 1.0)) * z + 2.0 * r;
}

static void check_param(const Parameter& p) {
  if (!finite(p.value))
    fail(ErrorCode::NonFiniteParameter, "parameter must be finite");
}

// Numerator/denominator of the map in the w = 1/z chart at w.
static void chart_inf(const Parameter& p, cplx w, cplx& num, cplx& den,
                      cplx& dnum, cplx& dden) {
  if (p.family == Family::Newton) {
    double r = p.value.real(), m = std::norm(p.value);
    // W(w) = w (4 - 6 r w + 2(m-1) w^2 + 2 r w^3) / (3 - 4 r w + (m-1) w^2 + m w^4)
    cplx g = ((2.0 * r * w + 2.0 * (m - 1.0)) * w - 6.0 * r) * w + 4.0;
    cplx dg = (6.0 * r * w + 4.0 * (m - 1.0)) * w - 6.0 * r;
    num = w * g;
    dnum = g + w * dg;
    den = (((m * w) * w + (m - 1.0)) * w - 4.0 * r) * w + 3.0;
    dden = ((4.0 * m * w) * w + 2.0 * (m - 1.0)) * w - 4.0 * r;
  } else {
    cplx q = p.value, qc = std::conj(q);
    // W(w) = w^2 (w + conj q) / (q w - 1)
    num = w * w * (w + qc);
    dnum = w * (3.0 * w + 2.0 * qc);
    den = q * w - 1.0;
    dden = q;
  }
}

// Finite-chart numerator/denominator.
static void chart_fin(const Parameter& p, cplx z, cplx& num, cplx& den,
                      cplx& dnum, cplx& dden) {
  if (p.family == Family::Newton) {
    double r = p.value.real(), m = std::norm(p.value);
    num = (((3.0 * z - 4.0 * r) * z + (m - 1.0)) * z) * z + m;
    dnum = ((12.0 * z - 12.0 * r) * z + 2.0 * (m - 1.0)) * z;
    den = ((4.0 * z - 6.0 * r) * z + 2.0 * (m - 1.0)) * z + 2.0 * r;
    dden = (12.0 * z - 12.0 * r) * z + 2.0 * (m - 1.0);
  } else {
    cplx q = p.value, qc = std::conj(q);
    num = z * z * (q - z);
    dnum = z * (2.0 * q - 3.0 * z);
    den = 1.0 + qc * z;
    dden = qc;
  }
}

Evaluation evaluate(const Parameter& p, SpherePoint zin) {
  check_param(p);
  SpherePoint z = zin.normalized();
  cplx num, den, dnum, dden;
  if (z.chart == Chart::Finite)
    chart_fin(p, z.z, num, den, dnum, dden);
  else
    chart_inf(p, z.z, num, den, dnum, dden);

  // num/den is expressed in the same chart as the input; flip when it leaves
  // the chart's range: the reciprocal is den/num with derivative
  // (dden num - den dnum)/num^2
  Evaluation e;
  bool flip = z.chart == Chart::Finite ? std::abs(num) > kChartSwitch * std::abs(den)
                                       : std::abs(num) * kChartSwitch >= std::abs(den);
  Chart same = z.chart, other = z.chart == Chart::Finite ? Chart::Infinity : Chart::Finite;
  if (flip) {
    e.w = {other, den / num};
    e.dw = (dden * num - den * dnum) / (num * num);
  } else {
    e.w = {same, num / den};
    e.dw = (dnum * den - num * dden) / (den * den);
  }
  // Newton quotient form would lose the f f''/f'^2 cancellation at the roots.
  if (p.family == Family::Newton && z.chart == Chart::Finite &&
      e.w.chart == Chart::Finite) {
    Map mp(p);
    mp.eval(z.z, e.dw);
  }
  return e;
}

CriticalPair free_critical_points(const Parameter& p) {
  check_param(p);
  if (p.family == Family::Newton) {
    cplx a = p.value;
    if (!p.in_u)
      fail(ErrorCode::OutsideDomain,
           "free criticals are conjugate only for a in U");
    double r = a.real(), s = a.imag();
    double disc = 12.0 * r * r - 24.0 * s * s + 24.0;  // < 0 in U
    cplx c = cplx(6.0 * r, std::sqrt(-disc)) / 12.0;
    return {c, std::conj(c)};
  }
  cplx q = p.value;
  if (q == 0.0)
    fail(ErrorCode::DegenerateParameter, "q = 0 merges the free and fixed criticals");
  double m = std::norm(q);
  double s = std::sqrt((m - 3.0) * (m - 3.0) + 16.0 * m);
  cplx qc4 = 4.0 * std::conj(q);
  // cancellation-free pair: product of roots is -q / conj(q)
  double big = (m - 3.0) >= 0 ? (m - 3.0) + s : (m - 3.0) - s;
  cplx r1 = big / qc4;
  cplx r2 = -q / std::conj(q) / r1;
  cplx plus = (m - 3.0) >= 0 ? r1 : r2;
  cplx minus = (m - 3.0) >= 0 ? r2 : r1;
  return {plus, minus};
}

PoleSet newton_poles(cplx a) {
  if (region_membership(a).region != Region::InU)
    fail(ErrorCode::OutsideDomain, "poles are tabulated for a in U");
  double r = a.real(), m = std::norm(a);
  auto fp = [&](double x) { return ((4.0 * x - 6.0 * r) * x + 2.0 * (m - 1.0)) * x + 2.0 * r; };
  double lo = -1.0, hi = 1.0;  // fp(-1) < 0 < fp(1)
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    double mid = 0.5 * (lo + hi);
    (fp(mid) < 0 ? lo : hi) = mid;
  }
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < 3; ++i) {
    double d = (12.0 * x - 12.0 * r) * x + 2.0 * (m - 1.0);
    if (d == 0.0) break;
    double nx = x - fp(x) / d;
    if (nx > -1.0 && nx < 1.0) x = nx;
  }
  // deflate: 4z^3 - 6r z^2 + 2(m-1)z + 2r = (z - x)(4z^2 + b z + c)
  double b = 4.0 * x - 6.0 * r;
  double c = b * x + 2.0 * (m - 1.0);
  cplx disc = b * b - 16.0 * c;
  cplx root = (-b + std::sqrt(disc)) / 8.0;
  if (root.imag() < 0) root = std::conj(root);
  // polish against the cubic
  for (int i = 0; i < 3; ++i) {
    cplx v = newton_fprime(a, root);
    cplx d = (12.0 * root - 12.0 * r) * root + 2.0 * (m - 1.0);
    if (d == 0.0) break;
    root -= v / d;
  }
  return {x, root};
}

SpherePoint involution(const Parameter& p, SpherePoint z) {
  if (p.family == Family::Newton) return {z.chart, std::conj(z.z)};
  // eta(z) = -1/conj(z): finite z maps to infinity chart coordinate -conj(z)
  if (z.chart == Chart::Finite) {
    if (z.z == 0.0) return SpherePoint::infinity();
    return SpherePoint{Chart::Finite, -1.0 / std::conj(z.z)}.normalized();
  }
  // z holds w = 1/Z; eta(Z) = -1/conj(Z) = -conj(w)
  return SpherePoint{Chart::Finite, -std::conj(z.z)}.normalized();
}

}  // namespace atlas
