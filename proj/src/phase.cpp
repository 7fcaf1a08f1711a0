#include <algorithm>
#include <cmath>
#include <optional>

#include <Eigen/Dense>

#include "arc_system.hpp"
#include "atlas/parabolic.hpp"

namespace atlas {

namespace {

struct Split {
  cplx wa, wb;    // fixed points of the return map, swapped by the half-return
  cplx mu_a, mu_b;  // logs of their multipliers
  bool swapped = false;
};

// Fixed points of the return map near z1 at parameter p.
std::optional<Split> split_points(const Parameter& p, const ParabolicDatum& ref) {
  Map f(p);
  int per = ref.period;
  cplx z1 = ref.parabolic_point;
  cplx g = f.iterate(z1, per) - z1;
  cplx s = std::sqrt(-g / ref.A);
  if (std::abs(s) < 1e-12) s = 1e-6;
  cplx pts[2];
  for (int k = 0; k < 2; ++k) {
    cplx z = z1 + (k ? -s : s);
    bool ok = false;
    for (int it = 0; it < 60; ++it) {
      cplx d;
      cplx e = f.iterate(z, per, &d) - z;
      cplx dz = e / (d - 1.0);
      if (!std::isfinite(std::abs(dz))) break;
      z -= dz;
      if (std::abs(dz) < 1e-14 * std::max(1.0, std::abs(z))) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      cplx d;
      ok = std::abs(f.iterate(z, per, &d) - z) < 1e-13 * std::max(1.0, std::abs(z));
    }
    if (!ok || std::abs(z - z1) > 0.5) return std::nullopt;
    pts[k] = z;
  }
  double sep = std::abs(pts[0] - pts[1]);
  if (sep < 1e-9) return std::nullopt;
  Split sp;
  sp.wa = pts[0];
  sp.wb = pts[1];
  cplx da, db;
  f.iterate(sp.wa, per, &da);
  f.iterate(sp.wb, per, &db);
  sp.mu_a = std::log(da);
  sp.mu_b = std::log(db);
  Map fm(p);
  cplx sig = fm.inv(fm.iterate(sp.wa, ref.half()));
  sp.swapped = std::abs(sig - sp.wb) < 1e-6 * sep && std::abs(sig - sp.wa) > 0.5 * sep;
  return sp;
}

}  // namespace

namespace {

// Fatou coordinate of the return map on the gate between the split points:
// log model plus a least-squares polynomial correction.
struct Gate {
  Map f;
  int per;
  cplx wa, wb, ma, mb, mid;
  double delta, radius;
  std::vector<cplx> c;  // correction coefficients in x = (w - mid)/radius
  double fit_residual = 0.0;

  Gate(const Parameter& p, int period, const Split& sp)
      : f(p), per(period), wa(sp.wa), wb(sp.wb), ma(sp.mu_a), mb(sp.mu_b) {
    mid = 0.5 * (wa + wb);
    delta = std::abs(wa - wb);
    radius = 0.4 * delta;
    fit();
  }

  cplx model(cplx w) const {
    return std::log((w - wa) / (wb - wa)) / ma + std::log((w - wb) / (wa - wb)) / mb;
  }
  cplx model_step(cplx w, cplx Fw) const {
    return std::log((Fw - wa) / (w - wa)) / ma + std::log((Fw - wb) / (w - wb)) / mb;
  }
  cplx poly(cplx w) const {
    cplx x = (w - mid) / radius, acc = 0.0;
    for (size_t k = c.size(); k-- > 0;) acc = (acc + c[k]) * x;
    return acc;
  }
  cplx operator()(cplx w) const { return model(w) + poly(w); }
  bool inside(cplx w) const { return std::abs(w - mid) < radius; }

  void fit() {
    constexpr int deg = 12;
    std::vector<cplx> pts;
    for (int i = 1; i <= 10; ++i)
      for (int j = 0; j < 32; ++j)
        pts.push_back(mid + radius * (i / 10.0) * std::polar(1.0, 2 * M_PI * (j + 0.5 * i) / 32));
    pts.push_back(mid);
    Eigen::MatrixXcd M(pts.size(), deg);
    Eigen::VectorXcd r(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) {
      cplx w = pts[i], Fw = f.iterate(w, per);
      cplx x0 = (w - mid) / radius, x1 = (Fw - mid) / radius;
      cplx p0 = 1.0, p1 = 1.0;
      for (int k = 0; k < deg; ++k) {
        p0 *= x0;
        p1 *= x1;
        M(Eigen::Index(i), k) = p1 - p0;
      }
      r[Eigen::Index(i)] = 1.0 - model_step(w, Fw);
    }
    Eigen::VectorXcd sol = M.colPivHouseholderQr().solve(r);
    c.assign(sol.data(), sol.data() + deg);
    fit_residual = (M * sol - r).cwiseAbs().maxCoeff();
  }

  // branch of the inverse continuing the flow backwards; homotopy from the
  // image of a one-step guess
  cplx inverse(cplx x) const {
    cplx y = x - (f.iterate(x, per) - x);
    cplx x0 = f.iterate(y, per);
    constexpr int stages = 8;
    for (int s = 1; s <= stages; ++s) {
      cplx xt = x0 + (x - x0) * (double(s) / stages);
      for (int it = 0; it < 40; ++it) {
        cplx d;
        cplx e = f.iterate(y, per, &d) - xt;
        cplx dy = e / d;
        y -= dy;
        if (std::abs(dy) < 1e-15 * std::max(1.0, std::abs(y))) break;
      }
    }
    return y;
  }

  // forward: first iterate entering the gate
  cplx forward(cplx z, long max_steps = 10000000) const {
    for (long k = 0; k < max_steps; ++k) {
      if (inside(z)) return (*this)(z) - double(k);
      z = f.iterate(z, per);
      if (!std::isfinite(std::abs(z))) break;
    }
    fail(ErrorCode::NotEscaping, "orbit never reached the gate");
  }

  cplx backward(cplx z, long max_steps = 1000000) const {
    for (long k = 0; k < max_steps; ++k) {
      if (inside(z)) return (*this)(z) + double(k);
      z = inverse(z);
      if (!std::isfinite(std::abs(z)) || std::abs(z - mid) > 1.0) break;
    }
    fail(ErrorCode::NotEscaping, "backward orbit never reached the gate");
  }
};

}  // namespace

constexpr double kXiRadius = 0.02;

PhaseSample repelling_fatou_and_phase(cplx param, const ParabolicDatum& ref) {
  auto p = Parameter::make(ref.param.family, param);
  auto sp = split_points(p, ref);
  if (!sp) fail(ErrorCode::SplitPointsNotFound, "no split fixed points near the parabolic point");
  if (!sp->swapped) fail(ErrorCode::NotEscaping, "split points are fixed by the half-return");
  Gate g(p, ref.period, *sp);
  Map f(p);
  cplx sm = f.inv(f.iterate(g.mid, ref.half()));
  cplx beta = g(sm) - std::conj(g(g.mid));
  double shift = -beta.imag() / 2.0;
  cplx unit = std::abs(ref.A) / ref.A;
  cplx xi1 = ref.parabolic_point - kXiRadius * unit, xi2 = ref.parabolic_point + kXiRadius * unit;
  double re_in = g.forward(xi1).real(), re_out = g.backward(xi2).real();
  auto c = free_critical_points(p).c_plus;
  cplx psi_in = g.forward(c) + cplx(-re_in, shift);
  // walk the critical orbit past the gate
  cplx z = c;
  long k = 0;
  bool seen = false;
  for (;; ++k) {
    if (g.inside(z)) seen = true;
    else if (seen) {
      cplx po = g.backward(z) + cplx(-re_out, shift);
      if (po.real() >= 0) {
        PhaseSample out;
        out.param = param;
        out.escape_time = k;
        out.lifted_phase = po.real() - double(k);
        out.transit_height = po.imag();
        out.incoming_height = psi_in.imag();
        return out;
      }
    }
    if (k > 10000000) fail(ErrorCode::NotEscaping, "critical orbit does not transit");
    z = f.iterate(z, ref.period);
  }
}

}  // namespace atlas

namespace atlas {

cplx arc_normal(const ParabolicDatum& d) {
  ArcSystem sys{d.param.family, d.half()};
  cplx z = d.parabolic_point, a = d.param.value;
  Eigen::Matrix<double, 3, 4> J;
  double x[4] = {z.real(), z.imag(), a.real(), a.imag()};
  for (int j = 0; j < 4; ++j) {
    double h = 1e-7 * std::max(1.0, std::abs(x[j]));
    double xp[4], xm[4];
    std::copy(x, x + 4, xp);
    std::copy(x, x + 4, xm);
    xp[j] += h;
    xm[j] -= h;
    J.col(j) = (sys.residual({xp[0], xp[1]}, {xp[2], xp[3]}) -
                sys.residual({xm[0], xm[1]}, {xm[2], xm[3]})) / (2 * h);
  }
  Eigen::Vector4d t;
  for (int i = 0; i < 4; ++i) {
    Eigen::Matrix3d minor;
    int c = 0;
    for (int j = 0; j < 4; ++j)
      if (j != i) minor.col(c++) = J.col(j);
    t[i] = ((i % 2) ? -1.0 : 1.0) * minor.determinant();
  }
  cplx n = cplx(0, 1) * cplx(t[2], t[3]);
  if (std::abs(n) == 0.0) fail(ErrorCode::DerivativeSingular, "arc tangent vanishes");
  n /= std::abs(n);
  // outward: the split points stop being fixed by the half-return
  double eps = 1e-6 * std::max(1.0, std::abs(a));
  auto sp = split_points(Parameter::make(d.param.family, a + eps * n), d);
  if (!sp || !sp->swapped) n = -n;
  return n;
}

}  // namespace atlas
