#include "atlas/parabolic.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "arc_system.hpp"
#include "series.hpp"

namespace atlas {

const char* petal_name(PetalKind k) { return k == PetalKind::Simple ? "Simple" : "Cusp"; }

// ------------------------------------------------------------- jets

std::vector<cplx> return_jet(const Parameter& p, cplx z1, int maps, int order) {
  size_t n = size_t(order) + 1;
  Series J = Series::variable(n, z1);
  double r = p.value.real(), m = std::norm(p.value);
  cplx q = p.value, qc = std::conj(p.value);
  for (int i = 0; i < maps; ++i) {
    if (p.family == Family::Newton) {
      Series J2 = J * J;
      Series num = ((J * 3.0 - 4.0 * r) * J + (m - 1.0)) * J2 + m;
      Series den = ((J * 4.0 - 6.0 * r) * J + 2.0 * (m - 1.0)) * J + 2.0 * r;
      J = num / den;
    } else {
      Series num = J * J * (Series(n, q) - J);
      Series den = J * qc + 1.0;
      J = num / den;
    }
  }
  return J.c;
}

// ------------------------------------------------------------- coordinate

AttractingCoordinate::AttractingCoordinate(cplx z1_, const std::vector<cplx>& jet,
                                           std::function<cplx(cplx)> step,
                                           double u_min_, int terms)
    : z1(z1_), u_min(u_min_), F(std::move(step)) {
  if (jet.size() < size_t(terms) + 4)
    fail(ErrorCode::InvalidArgument, "jet too short for the requested expansion");
  A = jet[2];
  B = jet[3];
  if (std::abs(A) < 1e-8) fail(ErrorCode::CuspReached, "quadratic coefficient vanishes");
  b = 1.0 - B / (A * A);
  // s(x) with F(z1 + w) - z1 = w s(x), w = -x/A
  size_t L = size_t(terms) + 3;
  Series s(L, 1.0);
  cplx scale = 1.0;
  for (size_t k = 1; k < L; ++k) {
    scale *= -1.0 / A;
    s.c[k] = jet[k + 1] * scale;
  }
  Series inv = reciprocal(s);
  Series base(L);  // (1/s - 1)/x + b log s - 1
  for (size_t k = 0; k + 1 < L; ++k) base.c[k] = inv.c[k + 1];
  base = base + b * log1(s);
  base.c[0] -= 1.0;
  d.assign(size_t(terms), 0.0);
  std::vector<Series> sk;  // x^j (s^j - 1)
  Series pw(L, 1.0);
  for (int j = 1; j <= terms; ++j) {
    pw = pw * s;
    Series t(L);
    for (size_t i = 0; i + size_t(j) < L; ++i) t.c[i + size_t(j)] = pw.c[i] - (i == 0 ? 1.0 : 0.0);
    sk.push_back(t);
  }
  for (int k = 1; k <= terms; ++k) {
    Series R = base;
    for (int j = 1; j < k; ++j) R = R + sk[size_t(j - 1)] * d[size_t(j - 1)];
    d[size_t(k - 1)] = R.c[size_t(k) + 1] / double(k);
  }
}

cplx AttractingCoordinate::phi(cplx u) const {
  cplx x = 1.0 / u, acc = 0.0;
  for (size_t k = d.size(); k-- > 0;) acc = (acc + d[k]) * x;
  return u - b * std::log(u) + acc;
}

cplx AttractingCoordinate::raw(cplx z, int* depth) const {
  int K = 0;
  for (;;) {
    cplx u = local_u(z);
    if (!std::isfinite(std::abs(u)) || !std::isfinite(std::abs(z)))
      fail(ErrorCode::NotInPetal, "orbit left the finite plane");
    if (u.real() >= u_min && std::abs(u.imag()) <= u.real()) break;
    if (K >= max_steps)
      fail(std::abs(z - z1) < 1e-2 ? ErrorCode::DepthExhausted : ErrorCode::NotInPetal,
           "orbit did not settle into the attracting petal");
    z = F(z);
    ++K;
  }
  if (depth) *depth = K;
  return phi(local_u(z)) - double(K);
}

// ------------------------------------------------------------- datum

cplx ParabolicDatum::sigma(cplx z) const {
  Map f(param);
  return f.inv(f.iterate(z, half()));
}

cplx ParabolicDatum::ret(cplx z) const {
  Map f(param);
  return f.iterate(z, period);
}

AttractingCoordinate ParabolicDatum::coordinate(double u_scale) const {
  Map f(param);
  int per = period;
  return AttractingCoordinate(parabolic_point, jet,
                              [f, per](cplx z) { return f.iterate(z, per); },
                              u_min * u_scale);
}

double cusp_indicator(const ParabolicDatum& d) {
  return std::abs(d.B / (d.A * d.A));
}

static FatouNormalization normalize(const ParabolicDatum& d,
                                    const AttractingCoordinate& co) {
  cplx zref = co.z1 - 1.0 / (co.A * (2.0 * co.u_min));
  int k1 = 0, k2 = 0;
  cplx p0 = co.raw(zref, &k1);
  cplx p1 = co.raw(d.sigma(zref), &k2);
  FatouNormalization n;
  n.beta = p1 - std::conj(p0);
  n.shift = -n.beta.imag() / 2.0;
  n.depth = std::max(k1, k2);
  return n;
}

constexpr int kJetOrder = 16;

ParabolicDatum make_datum(const Parameter& p, cplx z1, int period, double u_min) {
  ParabolicDatum d;
  d.param = p;
  d.period = period;
  d.parabolic_point = z1;
  d.jet = return_jet(p, z1, period, kJetOrder);
  d.A = d.jet[2];
  d.B = d.jet[3];
  d.multiplier_residual = std::abs(d.jet[1] - 1.0);
  Map f(p);
  cplx z = z1;
  for (int i = 0; i < period; ++i) {
    d.cycle.push_back(z);
    z = f(z);
  }
  if (std::abs(d.A) < 1e-8) {
    d.petal_kind = PetalKind::Cusp;
    d.b = std::numeric_limits<double>::infinity();
    return d;
  }
  d.b = 1.0 - d.B / (d.A * d.A);
  // smallest depth at which the expansion reproduces the return map; past
  // that point rounding in the local coordinate grows like U^2
  double bestU = 0.0, best = 1e300;
  for (double U = std::max(16.0, u_min); U < 1e5; U *= 2.0) {
    d.u_min = U;
    auto co = d.coordinate();
    double worst = 0.0;
    for (cplx dir : {cplx(1, 0), cplx(1, 0.7), cplx(1, -0.7)}) {
      cplx u = U * dir;
      cplx zz = z1 - 1.0 / (d.A * u);
      cplx v = co.local_u(d.ret(zz));
      worst = std::max(worst, std::abs(co.phi(v) - co.phi(u) - 1.0));
    }
    if (worst < best) {
      best = worst;
      bestU = U;
    }
    if (worst < 1e-9 || worst > 10 * best) break;
  }
  if (best > 1e-7) fail(ErrorCode::DepthExhausted, "asymptotic expansion did not settle");
  d.u_min = bestU;
  d.norm = normalize(d, d.coordinate());
  return d;
}

FatouValue attracting_fatou_coordinate(const ParabolicDatum& d, cplx z,
                                       double u_scale) {
  if (d.petal_kind != PetalKind::Simple)
    fail(ErrorCode::CuspReached, "Fatou coordinate requires a simple parabolic datum");
  auto co = d.coordinate(u_scale);
  FatouNormalization n = u_scale == 1.0 ? d.norm : normalize(d, co);
  int K = 0;
  cplx raw = co.raw(z, &K);
  n.depth = std::max(n.depth, K);
  return {raw + cplx(0.0, n.shift), n};
}

EcalleSample critical_ecalle_height(const ParabolicDatum& d, CriticalChoice which,
                                    double u_scale) {
  auto cp = free_critical_points(d.param);
  cplx z = cp.c_plus;
  if (which == CriticalChoice::Minus) {
    Map f(d.param);
    z = f.iterate(cp.c_minus, d.half());  // lands in the characteristic component
  }
  auto v = attracting_fatou_coordinate(d, z, u_scale);
  return {d.param.value, v.psi.imag(), d.multiplier_residual, d.petal_kind};
}

// ------------------------------------------------------------- boundary search

ParabolicDatum find_boundary_parabolic(const Parameter& center, cplx direction,
                                       int period) {
  if (period < 2 || period % 2)
    fail(ErrorCode::InvalidArgument, "period must be even");
  auto cls0 = classify(center, tier_budget(Tier::Standard));
  if (!(cls0.component == ComponentKind::Tricorn && cls0.component_period == period))
    fail(ErrorCode::InvalidArgument,
         "center does not classify as Tricorn(" + std::to_string(period) + ")");
  direction /= std::abs(direction);
  auto inside = [&](double s) {
    auto p = Parameter::make(center.family, center.value + s * direction);
    if (p.family == Family::Newton && !p.in_u) return false;
    auto c = classify(p, tier_budget(Tier::Standard));
    return c.component == ComponentKind::Tricorn && c.component_period == period;
  };
  double scale = std::max(1.0, std::abs(center.value));
  double lo = 0.0, hi = 1e-4 * scale;
  int k = 0;
  while (inside(hi)) {
    lo = hi;
    hi *= 1.5;
    if (++k > 80) fail(ErrorCode::BisectionFailed, "no verdict change along the ray");
  }
  while (hi - lo > 1e-9 * scale) {
    double mid = 0.5 * (lo + hi);
    (inside(mid) ? lo : hi) = mid;
  }
  auto plo = Parameter::make(center.family, center.value + lo * direction);
  auto cls = classify(plo, tier_budget(Tier::Analysis));
  if (cls.kind != VerdictKind::AttractingCycle)
    fail(ErrorCode::BisectionFailed, "lost the attracting cycle at the bracket");
  // the cycle point that c_plus is attracted to
  Map f(plo);
  cplx w = f.iterate(free_critical_points(plo).c_plus, period * 4000);
  cplx zatt = cls.cycle.points[0];
  for (cplx z : cls.cycle.points)
    if (std::abs(z - w) < std::abs(zatt - w)) zatt = z;

  ArcSystem sys{center.family, period / 2};
  Eigen::Vector3d X(zatt.real(), zatt.imag(), lo);
  auto eval = [&](const Eigen::Vector3d& v) {
    cplx a = center.value + v[2] * direction;
    return sys.residual(cplx(v[0], v[1]), a);
  };
  bool ok = false;
  for (int it = 0; it < 40; ++it) {
    Eigen::Vector3d E = eval(X);
    Eigen::Matrix3d J;
    for (int j = 0; j < 3; ++j) {
      double h = 1e-7 * std::max(1.0, std::abs(X[j]));
      Eigen::Vector3d Xp = X, Xm = X;
      Xp[j] += h;
      Xm[j] -= h;
      J.col(j) = (eval(Xp) - eval(Xm)) / (2 * h);
    }
    Eigen::Vector3d dX = J.fullPivLu().solve(-E);
    if (!dX.allFinite()) break;
    double lim = 0.1 * std::max(1.0, X.head<2>().norm());
    if (dX.norm() > lim) dX *= lim / dX.norm();
    X += dX;
    if (dX.norm() < 1e-14 * std::max(1.0, X.norm())) {
      ok = eval(X).norm() < 1e-11;
      break;
    }
  }
  if (!ok) fail(ErrorCode::RefinementDiverged, "saddle-node refinement did not converge");
  auto pp = Parameter::make(center.family, center.value + X[2] * direction);
  auto d = make_datum(pp, cplx(X[0], X[1]), period);
  if (d.multiplier_residual > 1e-6)
    fail(ErrorCode::RefinementDiverged, "multiplier not at 1 after refinement");
  return d;
}

}  // namespace atlas
