#include "atlas/orbit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <numeric>

#include "immediacy.hpp"

namespace atlas {

const char* target_name(Target t) {
  switch (t) {
    case Target::One: return "1";
    case Target::MinusOne: return "-1";
    case Target::A: return "a";
    case Target::ABar: return "conj(a)";
    case Target::Zero: return "0";
    case Target::Infinity: return "inf";
  }
  return "?";
}

std::string Classification::verdict_string() const {
  switch (kind) {
    case VerdictKind::FixedBasin:
      return std::string("FixedBasin(") + target_name(target) +
             (immediate ? ",immediate)" : ",preimage)");
    case VerdictKind::AttractingCycle:
      return "AttractingCycle(" + std::to_string(cycle.period) + ")";
    case VerdictKind::Undecided:
      return "Undecided";
  }
  return "Undecided";
}

std::string Classification::component_string() const {
  switch (component) {
    case ComponentKind::Principal: return "Principal";
    case ComponentKind::Capture: return "Capture";
    case ComponentKind::Mandelbrot:
      return "Mandelbrot(" + std::to_string(component_period) + ")";
    case ComponentKind::Tricorn:
      return "Tricorn(" + std::to_string(component_period) + ")";
    case ComponentKind::Unknown: return "Unknown";
  }
  return "Unknown";
}

std::vector<std::pair<Target, cplx>> fixed_targets(const Parameter& p) {
  if (p.family == Family::Newton)
    return {{Target::One, 1.0},
            {Target::MinusOne, -1.0},
            {Target::A, p.value},
            {Target::ABar, std::conj(p.value)}};
  return {{Target::Zero, 0.0}};
}

RefineResult refine_periodic(const Map& f, cplx z0, int p, double tol) {
  if (p < 1) fail(ErrorCode::InvalidArgument, "period must be positive");
  RefineResult res{z0, 0.0, 0, {}};
  cplx z = z0;
  for (int step = 0; step < 50; ++step) {
    cplx d;
    cplx fz = f.iterate(z, p, &d);
    cplx g = fz - z;
    double ag = std::abs(g);
    if (!std::isfinite(ag)) fail(ErrorCode::NoConvergence, "orbit hit a pole");
    res.residuals.push_back(ag);
    if (ag < tol) {
      res.z = z;
      res.multiplier = d;
      res.steps = step;
      return res;
    }
    cplx gp = d - 1.0;
    if (std::abs(gp) < 1e-14)
      fail(ErrorCode::DerivativeSingular, "|G'| below 1e-14");
    cplx dz = g / gp;
    // damp huge jumps; the caller promised a nearby root
    double lim = std::max(1.0, std::abs(z));
    if (std::abs(dz) > lim) dz *= lim / std::abs(dz);
    z -= dz;
  }
  fail(ErrorCode::NoConvergence, "no periodic point after 50 Newton steps");
}

int minimal_period(const Map& f, cplx z, int p, double tol) {
  for (int d = 1; d < p; ++d) {
    if (p % d) continue;
    cplx w = f.iterate(z, d);
    if (std::abs(w - z) < tol * std::max(1.0, std::abs(z))) return d;
  }
  return p;
}

bool cycle_self_symmetric(const Map& f, const std::vector<cplx>& pts,
                          double tol) {
  for (cplx z : pts) {
    cplx w = f.inv(z);
    bool hit = false;
    for (cplx y : pts)
      if (std::abs(y - w) < tol * std::max(1.0, std::abs(w))) {
        hit = true;
        break;
      }
    if (!hit) return false;
  }
  return true;
}

static Cycle build_cycle(const Map& f, cplx z, int p, const Tolerances& tol) {
  Cycle c;
  c.period = p;
  c.points.reserve(p);
  cplx mult = 1.0;
  for (int i = 0; i < p; ++i) {
    c.points.push_back(z);
    cplx d;
    z = f.eval(z, d);
    mult *= d;
  }
  c.multiplier = mult;
  c.self_symmetric = cycle_self_symmetric(f, c.points, tol.symmetry);
  return c;
}

// Tries to turn a near return into a refined attracting cycle.
static std::optional<Cycle> try_cycle(const Map& f, cplx z, int p,
                                      const Tolerances& tol) {
  try {
    auto r = refine_periodic(f, z, p, tol.residual * std::max(1.0, std::abs(z)));
    if (!(std::abs(r.multiplier) < 1.0)) return std::nullopt;
    int q = minimal_period(f, r.z, p);
    return build_cycle(f, r.z, q, tol);
  } catch (const Error&) {
    return std::nullopt;
  }
}

Cycle detect_cycle(const Map& f, const std::vector<cplx>& tail,
                   const Tolerances& tol) {
  int n = static_cast<int>(tail.size());
  if (n < 2) fail(ErrorCode::NoCycleFound, "orbit tail too short");
  bool saw_return = false;
  for (int k = n - 1; k >= 1; --k) {
    for (int p = 1; p <= k; ++p) {
      if (std::abs(tail[k] - tail[k - p]) < tol.near_return) {
        if (p > tol.period_cap)
          fail(ErrorCode::PeriodCapExceeded, "near return beyond period cap");
        saw_return = true;
        if (auto c = try_cycle(f, tail[k], p, tol)) return *c;
        break;
      }
    }
    if (n - k > 2 * tol.period_cap) break;
  }
  (void)saw_return;
  fail(ErrorCode::NoCycleFound, "no near return in the orbit tail");
}

namespace {

struct Orbit {
  const Map& f;
  bool antipodal;
  bool inf = false;  // antipodal: z holds w = 1/z
  cplx z;

  void step() {
    if (!inf) {
      z = f(z);
      if (antipodal && !(std::abs(z) <= kChartSwitch)) {
        inf = true;
        z = std::isfinite(std::abs(z)) ? 1.0 / z : 0.0;
      }
    } else {
      cplx w = z;
      z = w * w * (w + f.qc) / (f.par * w - 1.0);
      if (std::abs(z) >= 1.0) {
        inf = false;
        z = 1.0 / z;
      }
    }
  }
  cplx finite_value() const { return inf ? (z == 0.0 ? cplx(1e300) : 1.0 / z) : z; }
};

}  // namespace

static void set_component(Classification& c, Family fam) {
  switch (c.kind) {
    case VerdictKind::FixedBasin: {
      bool principal_target =
          fam == Family::Newton
              ? (c.target == Target::One || c.target == Target::MinusOne)
              : true;
      c.component = (principal_target && c.immediate) ? ComponentKind::Principal
                                                      : ComponentKind::Capture;
      c.component_period = 0;
      break;
    }
    case VerdictKind::AttractingCycle:
      if (c.cycle.self_symmetric) {
        c.component = ComponentKind::Tricorn;
      } else {
        c.component = ComponentKind::Mandelbrot;
      }
      c.component_period = c.cycle.period;
      break;
    case VerdictKind::Undecided:
      c.component = ComponentKind::Unknown;
      c.component_period = 0;
      break;
  }
}

Classification classify_point(const Parameter& p, cplx start, long budget,
                              const Tolerances& tol, ImmediacyTest imm) {
  if (p.family == Family::Newton && !p.in_u)
    fail(ErrorCode::OutsideDomain, "Newton parameter outside U");
  Map f(p);
  auto targets = fixed_targets(p);
  bool anti = p.family == Family::Antipodal;
  Orbit orb{f, anti, false, start};
  if (anti && std::abs(start) > kChartSwitch) {
    orb.inf = true;
    orb.z = 1.0 / start;
  }

  constexpr int kRing = 256;
  std::array<cplx, kRing> ring{};
  long next_cycle_try = 64;

  Classification out;
  for (long k = 0; k <= budget; ++k) {
    // superattracting fixed points
    int hit = -1;
    if (anti && orb.inf) {
      if (std::abs(orb.z) < tol.attract) hit = 100;
    } else {
      for (size_t i = 0; i < targets.size(); ++i)
        if (std::abs(orb.z - targets[i].second) < tol.attract) hit = int(i);
    }
    if (hit >= 0) {
      Orbit probe = orb;
      bool ok = true;
      for (int j = 0; j < 10 && ok; ++j) {
        probe.step();
        double d = hit == 100 ? (probe.inf ? std::abs(probe.z) : 1.0)
                              : (probe.inf ? 1.0 : std::abs(probe.z - targets[hit].second));
        ok = d < tol.attract;
      }
      if (ok) {
        out.kind = VerdictKind::FixedBasin;
        out.target = hit == 100 ? Target::Infinity : targets[hit].first;
        out.budget_spent = k;
        break;
      }
    }
    ring[k % kRing] = orb.finite_value();
    if (!std::isfinite(std::abs(orb.z))) {
      out.budget_spent = k;
      break;  // exact pole hit: stuck at the repelling fixed point at infinity
    }
    if (k >= next_cycle_try && k % 16 == 0) {
      cplx zk = ring[k % kRing];
      for (int per = 1; per <= tol.period_cap && per <= k; ++per) {
        if (std::abs(zk - ring[(k - per) % kRing]) < tol.near_return) {
          if (auto c = try_cycle(f, zk, per, tol)) {
            out.kind = VerdictKind::AttractingCycle;
            out.cycle = *c;
            out.budget_spent = k;
          } else {
            next_cycle_try = k + 256;
          }
          break;
        }
      }
      if (out.kind == VerdictKind::AttractingCycle) break;
    }
    orb.step();
    out.budget_spent = k;
  }

  if (out.kind == VerdictKind::FixedBasin) {
    if (p.family == Family::Newton &&
        (out.target == Target::A || out.target == Target::ABar)) {
      out.immediate = false;
    } else {
      out.immediate = in_immediate_basin(p, start, out.target, imm);
    }
  }
  set_component(out, p.family);
  return out;
}

Classification classify(const Parameter& p, long budget, const Tolerances& tol,
                        ImmediacyTest imm) {
  if (p.family == Family::Newton && !p.in_u)
    fail(ErrorCode::OutsideDomain, "Newton parameter outside U");
  auto cp = free_critical_points(p);
  return classify_point(p, cp.c_plus, budget, tol, imm);
}

// ---------------------------------------------------------------- centers

static double newton_g(double t, int n, bool& pole) {
  auto p = Parameter::newton(cplx(0.0, t));
  Map f(p);
  cplx c = free_critical_points(p).c_plus;
  cplx z = c;
  pole = false;
  for (int i = 0; i < n; ++i) {
    z = f(z);
    if (!(std::abs(z) < 1e12)) {
      pole = true;
      return 0.0;
    }
  }
  return (z + c).imag();
}

// Bisection with secant acceleration; tolerates a pole inside the bracket.
template <class G>
static double bracket_root(G&& g, double lo, double hi, double glo, double ghi) {
  bool side = false;
  for (int it = 0; it < 300; ++it) {
    double t = 0.5 * (lo + hi);
    if (std::isfinite(glo) && std::isfinite(ghi) && !side) {
      double s = hi - ghi * (hi - lo) / (ghi - glo);
      if (s > lo && s < hi) t = s;
    }
    double gt = g(t);
    if (std::abs(gt) < 1e-14 || hi - lo < 1e-16 * std::abs(hi)) return t;
    bool moved_lo = (gt < 0) == (glo < 0);
    // alternate plain bisection after a one-sided secant step
    side = !side && ((moved_lo && t - lo < 0.1 * (hi - lo)) ||
                     (!moved_lo && hi - t < 0.1 * (hi - lo)));
    if (moved_lo) {
      lo = t;
      glo = gt;
    } else {
      hi = t;
      ghi = gt;
    }
  }
  return std::abs(glo) < std::abs(ghi) ? lo : hi;
}

double newton_center_residual(cplx a, int n) {
  auto p = Parameter::newton(a);
  Map f(p);
  cplx c = free_critical_points(p).c_plus;
  return std::abs(f.iterate(c, 2 * n) - c);
}

double antipodal_center_residual(cplx q, int r) {
  auto p = Parameter::antipodal(q);
  Map f(p);
  auto cp = free_critical_points(p);
  return std::abs(f.iterate(cp.c_plus, r) - cp.c_minus);
}

CenterSearchReport center_search_newton(int n, double t_lo, double t_hi,
                                        int samples) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "half-period must be >= 1");
  if (!(t_lo > 1.0) || !(t_hi > t_lo))
    fail(ErrorCode::InvalidArgument, "t range must lie in (1, inf)");
  CenterSearchReport rep;
  std::vector<double> ts(samples + 1), gs(samples + 1);
  std::vector<char> bad(samples + 1);
  for (int i = 0; i <= samples; ++i) {
    ts[i] = t_lo + (t_hi - t_lo) * i / samples;
    bool pole;
    gs[i] = newton_g(ts[i], n, pole);
    bad[i] = pole;
    if (pole) rep.pole_hits.push_back(ts[i]);
  }
  for (int i = 0; i < samples; ++i) {
    if (bad[i] || bad[i + 1]) continue;
    if (gs[i] == 0.0 || (gs[i] < 0) == (gs[i + 1] < 0)) {
      if (gs[i] != 0.0) continue;
    }
    double lo = ts[i], hi = ts[i + 1];
    auto g = [&](double t) {
      bool pole;
      double v = newton_g(t, n, pole);
      return pole ? (v = std::numeric_limits<double>::infinity()) : v;
    };
    double root = gs[i] == 0.0 ? lo : bracket_root(g, lo, hi, gs[i], gs[i + 1]);
    if (!(std::abs(g(root)) < 1e-12)) {
      rep.pole_hits.push_back(root);  // sign change across a pole
      continue;
    }
    cplx a(0.0, root);
    auto cls = classify(Parameter::newton(a), tier_budget(Tier::Analysis));
    if (cls.component == ComponentKind::Tricorn && cls.component_period == 2 * n)
      rep.centers.push_back(a);
    else
      rep.rejected.push_back(a);
  }
  if (rep.centers.empty() && rep.rejected.empty())
    fail(ErrorCode::NoRootInRange, "no sign change of the center function");
  return rep;
}

std::vector<cplx> default_antipodal_seeds() {
  std::vector<cplx> s;
  for (int i = 1; i <= 20; ++i)
    for (int j = 1; j <= 20; ++j) s.emplace_back(0.2 * i, 0.2 * j);
  return s;
}

std::optional<cplx> refine_center(Family fam, cplx q, int r) {
  if (r < 1) fail(ErrorCode::InvalidArgument, "return time must be >= 1");
  auto F = [fam, r](cplx x) -> cplx {
    auto p = Parameter::make(fam, x);
    Map f(p);
    auto cp = free_critical_points(p);
    return f.iterate(cp.c_plus, r) - cp.c_minus;
  };
  double last = 1.0;
  for (int it = 0; it < 80; ++it) {
    cplx v;
    try {
      v = F(q);
    } catch (const Error&) {
      return std::nullopt;
    }
    if (!std::isfinite(std::abs(v))) return std::nullopt;
    if (std::abs(v) < 1e-13) return q;
    double scale = std::max(1.0, std::abs(q));
    // long critical orbits are strongly expanding in q: shrink the
    // difference step until it is well below the Newton step
    double h = std::min(1e-7, std::max(1e-13, 0.01 * last)) * scale;
    cplx step;
    bool good = false;
    try {
      for (int pass = 0; pass < 6; ++pass) {
        cplx fx = (F(q + h) - F(q - h)) / (2 * h);
        cplx fy = (F(q + cplx(0, h)) - F(q - cplx(0, h))) / (2 * h);
        double a11 = fx.real(), a12 = fy.real(), a21 = fx.imag(), a22 = fy.imag();
        double det = a11 * a22 - a12 * a21;
        if (!std::isfinite(det) || det == 0.0) break;
        double dx = (a22 * v.real() - a12 * v.imag()) / det;
        double dy = (-a21 * v.real() + a11 * v.imag()) / det;
        step = cplx(-dx, -dy);
        good = true;
        if (std::abs(step) >= 10 * h || h <= 1e-13 * scale) break;
        h = std::max(1e-13 * scale, 0.01 * std::abs(step));
      }
    } catch (const Error&) {
      return std::nullopt;
    }
    if (!good) return std::nullopt;
    last = std::abs(step) / scale;
    // residual floor set by the sensitivity of long orbits
    if (last < 4e-15 && std::abs(v) < 1e-6) return q;
    double lim = 0.5 * scale;
    if (std::abs(step) > lim) step *= lim / std::abs(step);
    q += step;
    if (std::abs(q) > 1e4 || q == 0.0) return std::nullopt;
  }
  return std::nullopt;
}

AntipodalSearchReport center_search_antipodal(int r,
                                              const std::vector<cplx>& seeds) {
  if (r < 1) fail(ErrorCode::InvalidArgument, "return time must be >= 1");
  AntipodalSearchReport rep;
  std::vector<cplx> roots;
  for (cplx seed : seeds) {
    auto root = refine_center(Family::Antipodal, seed, r);
    if (!root) {
      ++rep.dropped;
      continue;
    }
    cplx q = *root;
    bool dup = false;
    for (cplx y : roots)
      if (std::abs(y - q) < 1e-8) dup = true;
    if (!dup) roots.push_back(q);
  }
  for (cplx q : roots) {
    auto cls = classify(Parameter::antipodal(q), tier_budget(Tier::Analysis));
    bool good = cls.component == ComponentKind::Tricorn &&
                cls.component_period % 2 == 0 &&
                (2 * r) % cls.component_period == 0;
    (good ? rep.centers : rep.rejected).push_back(q);
  }
  return rep;
}

}  // namespace atlas
