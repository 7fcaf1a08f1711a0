#include "atlas/visibility.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

#include <Eigen/Dense>

#include "immediacy.hpp"

namespace atlas {

const char* tag_name(PointTag t) { return t == PointTag::Root ? "Root" : "CoRoot"; }

const char* visibility_name(VisibilityState s) {
  switch (s) {
    case VisibilityState::Visible: return "Visible";
    case VisibilityState::Invisible: return "Invisible";
    default: return "Undecided";
  }
}

namespace {

// Labels: fixed targets by target_index, 100 + j for the return-map basin of
// cycle point j, -1 undecided.
struct Labeler {
  Map f;
  std::vector<cplx> cycle;  // ordered along f
  int budget = 2000;
  double eps = 1e-7;

  explicit Labeler(const Parameter& p) : f(p) {}

  int operator()(cplx z) const {
    int L = int(cycle.size());
    bool anti = f.family == Family::Antipodal;
    for (int k = 0; k <= budget; ++k) {
      if (anti) {
        double r = std::abs(z);
        if (r < 1e-6) return 0;
        if (!(r < 1e6)) return 1;
      } else {
        if (!std::isfinite(std::abs(z))) return -1;
        if (std::abs(z - 1.0) < 1e-6) return 0;
        if (std::abs(z + 1.0) < 1e-6) return 1;
        if (std::abs(z - f.par) < 1e-6) return 2;
        if (std::abs(z - std::conj(f.par)) < 1e-6) return 3;
      }
      for (int j = 0; j < L; ++j)
        if (std::abs(z - cycle[size_t(j)]) < eps) return 100 + ((j - k) % L + L) % L;
      z = f(z);
    }
    return -1;
  }
};

std::vector<cplx> ordered_cycle(const Map& f, cplx z0, int L) {
  std::vector<cplx> c;
  cplx z = z0;
  for (int i = 0; i < L; ++i) {
    c.push_back(z);
    z = f(z);
  }
  return c;
}

cplx half_return(const Map& f, int n, cplx z) { return f.inv(f.iterate(z, n)); }

// Square raster with lazily evaluated labels and breadth-first fill.
struct Grid {
  cplx lo;  // centre of pixel (0, 0)
  double h;
  int n;
  std::vector<int> label;  // INT_MIN: not evaluated
  std::vector<char> in;

  Grid(cplx center, double half, int n_) : n(n_) {
    h = 2 * half / n;
    lo = center - cplx(half - 0.5 * h, half - 0.5 * h);
    label.assign(size_t(n) * size_t(n), kUnset);
    in.assign(size_t(n) * size_t(n), 0);
  }
  static constexpr int kUnset = -1000;

  cplx at(int i, int j) const { return lo + cplx(i * h, j * h); }
  bool index(cplx z, int& i, int& j) const {
    i = int(std::lround((z.real() - lo.real()) / h));
    j = int(std::lround((z.imag() - lo.imag()) / h));
    return i >= 0 && j >= 0 && i < n && j < n;
  }
  size_t id(int i, int j) const { return size_t(j) * size_t(n) + size_t(i); }

  template <class L>
  int lab(int i, int j, const L& labeler) {
    int& v = label[id(i, j)];
    if (v == kUnset) v = labeler(at(i, j));
    return v;
  }

  template <class L>
  void fill(const std::vector<std::pair<int, int>>& seeds, int want, const L& labeler) {
    std::deque<std::pair<int, int>> q;
    for (auto [i, j] : seeds)
      if (!in[id(i, j)] && lab(i, j, labeler) == want) {
        in[id(i, j)] = 1;
        q.push_back({i, j});
      }
    const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
    while (!q.empty()) {
      auto [i, j] = q.front();
      q.pop_front();
      for (int k = 0; k < 4; ++k) {
        int a = i + di[k], b = j + dj[k];
        if (a < 0 || b < 0 || a >= n || b >= n || in[id(a, b)]) continue;
        if (lab(a, b, labeler) == want) {
          in[id(a, b)] = 1;
          q.push_back({a, b});
        }
      }
    }
  }

  bool filled_at(cplx z) const {
    int i, j;
    return index(z, i, j) && in[id(i, j)];
  }
  bool touches_border() const {
    for (int k = 0; k < n; ++k)
      if (in[id(k, 0)] || in[id(k, n - 1)] || in[id(0, k)] || in[id(n - 1, k)]) return true;
    return false;
  }
};

// Real 2x2 Newton on sigma(z) = z with a finite-difference Jacobian.
std::optional<cplx> solve_sigma_fixed(const Map& f, int n, cplx z) {
  for (int it = 0; it < 60; ++it) {
    cplx e = half_return(f, n, z) - z;
    if (!std::isfinite(std::abs(e))) return std::nullopt;
    double h = 1e-7 * std::max(1.0, std::abs(z));
    cplx ex = (half_return(f, n, z + h) - (z + h) - (half_return(f, n, z - h) - (z - h))) / (2 * h);
    cplx ey = (half_return(f, n, z + cplx(0, h)) - (z + cplx(0, h)) -
               (half_return(f, n, z - cplx(0, h)) - (z - cplx(0, h)))) / (2 * h);
    Eigen::Matrix2d J;
    J << ex.real(), ey.real(), ex.imag(), ey.imag();
    Eigen::Vector2d d = J.fullPivLu().solve(Eigen::Vector2d(-e.real(), -e.imag()));
    if (!d.allFinite()) return std::nullopt;
    z += cplx(d[0], d[1]);
    if (std::hypot(d[0], d[1]) < 1e-15 * std::max(1.0, std::abs(z))) break;
  }
  double res = std::abs(half_return(f, n, z) - z);
  if (!(res < 1e-11 * std::max(1.0, std::abs(z)))) return std::nullopt;
  return z;
}

// Local inverse of the return map fixing p, applied to z near p.
cplx local_inverse(const Map& f, int L, cplx p, cplx lambda, cplx z) {
  cplx y = p + (z - p) / lambda;
  for (int it = 0; it < 50; ++it) {
    cplx d;
    cplx e = f.iterate(y, L, &d) - z;
    cplx dy = e / d;
    y -= dy;
    if (std::abs(dy) < 1e-16 * std::max(1.0, std::abs(y))) break;
  }
  return y;
}

}  // namespace

// ------------------------------------------------------------ boundary triple

BoundaryTriple half_return_boundary_points(const Parameter& p) {
  auto cls = classify(p, tier_budget(Tier::Analysis));
  if (cls.component != ComponentKind::Tricorn)
    fail(ErrorCode::InvalidArgument, "parameter does not classify as a tricorn component");
  int L = cls.component_period, n = L / 2;
  Map f(p);
  Labeler lab(p);
  lab.cycle = ordered_cycle(f, cls.cycle.points.front(), L);
  int jstar = -1;
  for (int j = 0; j < L; ++j)
    if (std::abs(half_return(f, n, lab.cycle[size_t(j)]) - lab.cycle[size_t(j)]) < 1e-8) {
      jstar = j;
      break;
    }
  if (jstar < 0) fail(ErrorCode::SeedingFailed, "no cycle point is fixed by the half-return");
  cplx zs = lab.cycle[size_t(jstar)];
  int want = 100 + jstar;

  constexpr int N = 401;
  double half = 0.25 * std::max(1.0, std::abs(zs));
  std::optional<Grid> g;
  for (int attempt = 0; attempt < 6; ++attempt, half *= 2) {
    g.emplace(zs, half, N);
    int i, j;
    g->index(zs, i, j);
    g->fill({{i, j}}, want, lab);
    if (!g->touches_border()) break;
  }

  struct Seed { double res; cplx z; };
  std::vector<Seed> seeds;
  std::vector<char> boundary(g->in.size(), 0);
  for (int j = 1; j + 1 < N; ++j)
    for (int i = 1; i + 1 < N; ++i) {
      if (!g->in[g->id(i, j)]) continue;
      if (g->in[g->id(i + 1, j)] && g->in[g->id(i - 1, j)] && g->in[g->id(i, j + 1)] &&
          g->in[g->id(i, j - 1)])
        continue;
      boundary[g->id(i, j)] = 1;
      cplx z = g->at(i, j);
      double r = std::abs(half_return(f, n, z) - z);
      if (std::isfinite(r)) seeds.push_back({r, z});
    }
  std::sort(seeds.begin(), seeds.end(), [](const Seed& a, const Seed& b) { return a.res < b.res; });

  auto near_boundary = [&](cplx z) {
    int i, j;
    if (!g->index(z, i, j)) return false;
    for (int b = std::max(0, j - 3); b <= std::min(N - 1, j + 3); ++b)
      for (int a = std::max(0, i - 3); a <= std::min(N - 1, i + 3); ++a)
        if (boundary[g->id(a, b)]) return true;
    return false;
  };

  std::vector<cplx> found;
  std::vector<cplx> tried;
  for (const auto& s : seeds) {
    if (tried.size() >= 200) break;
    bool close = false;
    for (cplx t : tried)
      if (std::abs(t - s.z) < 3 * g->h) close = true;
    if (close) continue;
    tried.push_back(s.z);
    auto z = solve_sigma_fixed(f, n, s.z);
    if (!z || !near_boundary(*z)) continue;
    bool dup = false;
    for (cplx q : found)
      if (std::abs(q - *z) < 1e-8) dup = true;
    if (!dup) found.push_back(*z);
    if (found.size() > 3) break;
  }
  if (found.size() < 3)
    fail(ErrorCode::SeedingFailed,
         "found " + std::to_string(found.size()) + " boundary fixed points, expected 3");
  if (found.size() > 3)
    fail(ErrorCode::SeedingFailed, "more than 3 boundary fixed points");

  std::sort(found.begin(), found.end(), [&](cplx a, cplx b) {
    return std::arg(a - zs) < std::arg(b - zs);
  });

  BoundaryTriple out;
  out.points = found;
  out.period = L;
  out.component_center = zs;
  for (int k = 0; k < 3; ++k) {
    cplx q = found[size_t(k)];
    out.max_residual = std::max(out.max_residual, std::abs(half_return(f, n, q) - q));
    if (p.family == Family::Newton && std::abs(-std::conj(q) - q) < 1e-8)
      out.symmetric_index = k;
  }

  // adjacency of periodic components at each point
  for (cplx q : found) {
    cplx lambda;
    f.iterate(q, L, &lambda);
    double r = 1e-4 * std::max(1.0, std::abs(q));
    std::set<int> periodic;
    constexpr int samples = 256;
    for (int s = 0; s < samples; ++s) {
      cplx z = q + std::polar(r, 2 * M_PI * (s + 0.5) / samples);
      int l = lab(z);
      if (l < 100 || periodic.count(l)) continue;
      // an invariant access: the inverse branch pulls z towards q inside the
      // same basin
      cplx y = local_inverse(f, L, q, lambda, z);
      bool same = true;
      for (int t = 0; t <= 16 && same; ++t) same = lab(y + (z - y) * (t / 16.0)) == l;
      if (same) periodic.insert(l);
    }
    if (!periodic.count(want))
      fail(ErrorCode::AmbiguousTag, "the characteristic component is not seen at a boundary point");
    out.tags.push_back(periodic.size() >= 2 ? PointTag::Root : PointTag::CoRoot);
  }
  return out;
}

// ------------------------------------------------------------ visibility

namespace {

std::vector<bool> basin_presence(const Parameter& p, cplx point, int target,
                                 const std::vector<double>& radii, const Labeler& lab) {
  std::vector<bool> pres;
  // coarse level containing the target's anchor
  double R = p.family == Family::Newton ? std::max(2.5, 1.25 * std::abs(point) + 0.5)
                                        : std::max(1.5, 1.25 * std::abs(point) + 0.25);
  constexpr int N0 = 513;
  Grid coarse(0.0, R, N0);
  std::vector<std::pair<int, int>> seeds;
  int mid = N0 / 2;
  if (p.family == Family::Newton) {
    for (int i = 0; i < N0; ++i) {
      double x = coarse.at(i, mid).real();
      if ((target == 0 && x >= 1.0) || (target == 1 && x <= -1.0)) seeds.push_back({i, mid});
    }
  } else {
    seeds.push_back({mid, mid});
  }
  coarse.fill(seeds, target, lab);

  const Grid* prev = &coarse;
  std::optional<Grid> cur, keep;
  constexpr int N = 129;
  for (double r : radii) {
    Grid g(point, 4 * r, N);
    std::vector<std::pair<int, int>> s;
    for (int j = 0; j < N; ++j)
      for (int i = 0; i < N; ++i) {
        cplx z = g.at(i, j);
        if (std::abs(z - point) >= 2 * r && prev->filled_at(z)) s.push_back({i, j});
      }
    g.fill(s, target, lab);
    bool present = false;
    for (int j = 0; j < N && !present; ++j)
      for (int i = 0; i < N; ++i)
        if (g.in[g.id(i, j)] && std::abs(g.at(i, j) - point) <= r) {
          present = true;
          break;
        }
    pres.push_back(present);
    keep = std::move(g);
    cur.swap(keep);
    prev = &*cur;
  }
  return pres;
}

VisibilityState verdict_of(const std::vector<bool>& pres) {
  if (std::all_of(pres.begin(), pres.end(), [](bool b) { return b; }))
    return VisibilityState::Visible;
  auto first_lost = std::find(pres.begin(), pres.end(), false);
  if (std::none_of(first_lost, pres.end(), [](bool b) { return b; }))
    return VisibilityState::Invisible;
  return VisibilityState::Undecided;
}

}  // namespace

VisibilityVerdict coroot_visibility(const Parameter& p, cplx point, double floor) {
  VisibilityVerdict v;
  for (double r = 1e-2; r >= floor * (1 - 1e-9); r *= 0.5) v.radii.push_back(r);
  if (v.radii.back() > floor * (1 + 1e-9)) v.radii.push_back(floor);
  v.finest_radius = v.radii.back();

  Labeler lab(p);
  auto cls = classify(p, tier_budget(Tier::Standard));
  if (cls.kind == VerdictKind::AttractingCycle)
    lab.cycle = ordered_cycle(lab.f, cls.cycle.points.front(), cls.cycle.period);

  struct Cand { Target t; cplx where; int index; };
  std::vector<Cand> cands;
  if (p.family == Family::Newton) {
    cands = {{Target::One, point, 0}, {Target::MinusOne, point, 1}};
  } else {
    cands = {{Target::Zero, point, 0}, {Target::Infinity, lab.f.inv(point), 0}};
  }
  std::vector<VisibilityState> states;
  for (const auto& c : cands) {
    auto pres = basin_presence(p, c.where, c.index, v.radii, lab);
    v.candidates.push_back(c.t);
    states.push_back(verdict_of(pres));
    v.presence.push_back(std::move(pres));
  }
  for (size_t k = 0; k < cands.size(); ++k)
    if (states[k] == VisibilityState::Visible) {
      v.state = VisibilityState::Visible;
      v.witness = cands[k].t;
      return v;
    }
  bool all_invisible = std::all_of(states.begin(), states.end(), [](VisibilityState s) {
    return s == VisibilityState::Invisible;
  });
  v.state = all_invisible ? VisibilityState::Invisible : VisibilityState::Undecided;
  return v;
}

// ------------------------------------------------------------ cylinder

namespace {

int relabel(Family fam, int c) {
  if (fam == Family::Newton) {
    if (c == 2) return 3;
    if (c == 3) return 2;
    return c;
  }
  if (c == 0) return 1;
  if (c == 1) return 0;
  return c;
}

}  // namespace

double CylinderRaster::glide_mismatch() const {
  long bad = 0;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      int i2 = (i + nx / 2) % nx, j2 = ny - 1 - j;
      if (relabel(family, at(i, j)) != at(i2, j2)) ++bad;
    }
  return double(bad) / double(nx * ny);
}

std::vector<double> CylinderRaster::class_fractions() const {
  std::vector<double> fr(kClassParabolic + 2, 0.0);
  for (auto c : cls) fr[size_t(c + 1)] += 1.0;
  for (auto& x : fr) x /= double(cls.size());
  return fr;
}

CylinderRaster cylinder_projection(const ParabolicDatum& d, int resolution, double h_max) {
  if (d.petal_kind != PetalKind::Simple)
    fail(ErrorCode::CuspReached, "cylinder projection requires a simple parabolic datum");
  if (resolution < 4 || h_max <= 0) fail(ErrorCode::InvalidArgument, "bad raster size");
  auto co = d.coordinate();
  cplx A = co.A, b = co.b, z1 = d.parabolic_point;
  auto phi_rep = [&](cplx u, cplx* dphi) {
    cplx x = 1.0 / u, acc = 0.0, dacc = 0.0;
    for (size_t k = co.d.size(); k-- > 0;) {
      acc = (acc + co.d[k]) * x;
      dacc = dacc * x + double(k + 1) * co.d[k];
    }
    if (dphi) *dphi = 1.0 - b / u - dacc * x * x;
    return u - b * std::log(-u) + acc;
  };
  auto u_of = [&](cplx z) { return -1.0 / (A * (z - z1)); };
  double U = std::max(d.u_min, 4 * h_max);
  cplx uref = -2.0 * U;
  cplx zref = z1 - 1.0 / (A * uref);
  cplx beta = phi_rep(u_of(d.sigma(zref)), nullptr) - std::conj(phi_rep(uref, nullptr));
  double shift = -beta.imag() / 2.0;
  double K = std::ceil(U + 1.0);

  auto point_of = [&](cplx zeta) {
    cplx target = zeta - K - cplx(0, shift);
    cplx u = target;
    for (int it = 0; it < 30; ++it) {
      cplx dp;
      cplx e = phi_rep(u, &dp) - target;
      u -= e / dp;
      if (std::abs(e) < 1e-13 * std::abs(target)) break;
    }
    return z1 - 1.0 / (A * u);
  };

  Map f(d.param);
  auto cycle = d.cycle;
  double ur = std::max(32.0, d.u_min / 2);
  auto classify_cell = [&](cplx z) -> int {
    bool anti = f.family == Family::Antipodal;
    for (int k = 0; k < 200000; ++k) {
      if (anti) {
        double r = std::abs(z);
        if (r < 1e-6) return 0;
        if (!(r < 1e6)) return 1;
      } else {
        if (!std::isfinite(std::abs(z))) return kClassUndecided;
        if (std::abs(z - 1.0) < 1e-6) return 0;
        if (std::abs(z + 1.0) < 1e-6) return 1;
        if (std::abs(z - f.par) < 1e-6) return 2;
        if (std::abs(z - std::conj(f.par)) < 1e-6) return 3;
      }
      if (std::abs(z - z1) < 0.1) {
        cplx u = u_of(z);
        if (u.real() >= ur && std::abs(u.imag()) <= u.real()) return kClassParabolic;
      }
      z = f(z);
    }
    return kClassUndecided;
  };

  CylinderRaster R;
  R.family = d.param.family;
  R.nx = resolution;
  R.ny = std::max(2, int(std::lround(2 * h_max * resolution)));
  R.h_max = h_max;
  R.cls.assign(size_t(R.nx) * size_t(R.ny), kClassUndecided);
  for (int j = 0; j < R.ny; ++j)
    for (int i = 0; i < R.nx; ++i)
      R.cls[size_t(j) * size_t(R.nx) + size_t(i)] =
          static_cast<signed char>(classify_cell(point_of(cplx(R.x_of(i), R.y_of(j)))));

  // upper region of the characteristic class and the heights of its boundary
  std::vector<char> top(R.cls.size(), 0);
  std::deque<std::pair<int, int>> q;
  for (int i = 0; i < R.nx; ++i)
    if (R.at(i, R.ny - 1) == kClassParabolic) {
      top[size_t(R.ny - 1) * size_t(R.nx) + size_t(i)] = 1;
      q.push_back({i, R.ny - 1});
    }
  while (!q.empty()) {
    auto [i, j] = q.front();
    q.pop_front();
    const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      int a = (i + di[k] + R.nx) % R.nx, bb = j + dj[k];
      if (bb < 0 || bb >= R.ny) continue;
      size_t id = size_t(bb) * size_t(R.nx) + size_t(a);
      if (!top[id] && R.at(a, bb) == kClassParabolic) {
        top[id] = 1;
        q.push_back({a, bb});
      }
    }
  }
  double hi = -1e300, lo = 1e300;
  for (int j = 0; j < R.ny; ++j)
    for (int i = 0; i < R.nx; ++i) {
      if (!top[size_t(j) * size_t(R.nx) + size_t(i)]) continue;
      bool edge = j == 0 || !top[size_t(j - 1) * size_t(R.nx) + size_t(i)] ||
                  !top[size_t(j) * size_t(R.nx) + size_t((i + 1) % R.nx)] ||
                  !top[size_t(j) * size_t(R.nx) + size_t((i + R.nx - 1) % R.nx)];
      if (!edge) continue;
      double y = R.y_of(j);
      hi = std::max(hi, y);
      lo = std::min(lo, y);
    }
  if (hi < lo) fail(ErrorCode::InvalidArgument, "raster too short: no characteristic region at the top");
  R.u_h = hi;
  R.l_h = lo;
  return R;
}

// ------------------------------------------------------------ scan

std::vector<HeightBand> full_basin_bands(const CylinderRaster& r) {
  std::vector<HeightBand> out;
  double dy = 2 * r.h_max / r.ny;
  for (int j = 0; j < r.ny; ++j) {
    int c = r.at(0, j);
    bool full = c >= 0 && c != kClassParabolic;
    for (int i = 1; full && i < r.nx; ++i) full = r.at(i, j) == c;
    if (!full) continue;
    double lo = r.y_of(j) - 0.5 * dy, hi = r.y_of(j) + 0.5 * dy;
    if (!out.empty() && out.back().cls == c && std::abs(out.back().hi - lo) < 1e-9 * dy)
      out.back().hi = hi;
    else
      out.push_back({lo, hi, c});
  }
  return out;
}

namespace {

// Return time r whose Newton step for f^r(c_plus) = c_minus is shortest,
// stopping once the orbit is trapped near a superattracting fixed point.
struct CenterGuess {
  int r = 0;
  double step = 0.0;
};

std::optional<CenterGuess> center_guess(const Parameter& p, double h) {
  constexpr int kMaxReturn = 4000;
  auto orbit = [&](cplx q, std::vector<cplx>& v, int cap) {
    auto pp = Parameter::make(p.family, q);
    Map f(pp);
    auto cp = free_critical_points(pp);
    cplx z = cp.c_plus;
    v.clear();
    for (int r = 1; r <= cap; ++r) {
      z = f(z);
      if (!std::isfinite(std::abs(z))) break;
      v.push_back(z - cp.c_minus);
    }
  };
  Map f(p);
  auto targets = fixed_targets(p);
  double rho = p.family == Family::Antipodal ? 0.3 / (1.0 + std::abs(p.value)) : 0.05;
  auto trapped = [&](cplx z) {
    if (p.family == Family::Antipodal) return std::abs(z) < rho || std::abs(z) > 1.0 / rho;
    for (const auto& [t, w] : targets)
      if (std::abs(z - w) < rho) return true;
    return false;
  };
  int cap = 0;
  {
    cplx z = free_critical_points(p).c_plus;
    for (cap = 1; cap <= kMaxReturn; ++cap) {
      z = f(z);
      if (!std::isfinite(std::abs(z)) || trapped(z)) break;
    }
  }
  std::vector<cplx> v0, vx, vy;
  orbit(p.value, v0, cap);
  orbit(p.value + h, vx, cap);
  orbit(p.value + cplx(0, h), vy, cap);
  size_t n = std::min({v0.size(), vx.size(), vy.size(), size_t(cap - 1)});
  std::optional<CenterGuess> best;
  for (size_t i = 1; i < n; ++i) {
    cplx fx = (vx[i] - v0[i]) / h, fy = (vy[i] - v0[i]) / h;
    double det = fx.real() * fy.imag() - fy.real() * fx.imag();
    if (!std::isfinite(det) || det == 0.0) continue;
    cplx v = v0[i];
    double dx = (fy.imag() * v.real() - fy.real() * v.imag()) / det;
    double dy = (-fx.imag() * v.real() + fx.real() * v.imag()) / det;
    double st = std::hypot(dx, dy);
    if (!best || st < best->step) best = CenterGuess{int(i) + 1, st};
  }
  return best;
}

}  // namespace

ScanReport arc_neighborhood_scan(const std::vector<ParabolicDatum>& arc, double window,
                                 const ScanOptions& opt) {
  ScanReport rep;
  if (arc.empty() || window <= 0 || opt.offsets < 2 || opt.normals_per_sample < 1)
    fail(ErrorCode::InvalidArgument, "empty arc, window or resolution");
  std::vector<double> ts;
  for (int k = 0; k < opt.offsets; ++k)
    ts.push_back(window * std::pow(1e-6, 1.0 - double(k) / (opt.offsets - 1)));

  // base points: the samples plus corrected arc points between neighbours
  std::vector<ParabolicDatum> base;
  for (size_t s = 0; s < arc.size(); ++s) {
    base.push_back(arc[s]);
    if (s + 1 == arc.size()) break;
    for (int k = 1; k < opt.normals_per_sample; ++k) {
      auto d = arc_point_between(arc[s], arc[s + 1], double(k) / opt.normals_per_sample);
      if (d) base.push_back(std::move(*d));
    }
  }

  auto budget = tier_budget(Tier::Standard);
  auto confirm = tier_budget(Tier::Analysis);
  // small tricorn components hide between samples: chase a nearby center
  auto refine_near = [&](const Parameter& p, double t, int arc_period) {
    auto g = center_guess(p, 1e-9 * t);
    if (!g || g->step > 0.3 * t) return;
    auto q = refine_center(p.family, p.value, g->r);
    if (!q || std::abs(*q - p.value) > t) return;
    double scale = std::max(1.0, std::abs(*q));
    for (const auto& h : rep.tricorn_hits)
      if (std::abs(h.param - *q) < 1e-12 * scale) return;
    auto pq = Parameter::make(p.family, *q);
    if (pq.family == Family::Newton && !pq.in_u) return;
    auto c = classify(pq, confirm);
    if (c.component == ComponentKind::Tricorn && c.component_period != arc_period)
      rep.tricorn_hits.push_back({*q, c.component_period});
  };
  std::vector<bool> doubling_near(base.size(), false);
  std::vector<double> hs(base.size(), std::nan(""));
  for (size_t s = 0; s < base.size(); ++s) {
    const auto& d = base[s];
    rep.arc_segment.push_back(d.param.value);
    try {
      hs[s] = critical_ecalle_height(d).h;
    } catch (const Error&) {
    }
    cplx nrm;
    try {
      nrm = arc_normal(d);
    } catch (const Error&) {
      continue;
    }
    for (double t : ts) {
      auto p = Parameter::make(d.param.family, d.param.value + t * nrm);
      if (p.family == Family::Newton && !p.in_u) continue;
      auto c = classify(p, budget);
      ++rep.classified;
      switch (c.component) {
        case ComponentKind::Principal:
          if (t <= opt.contact_fraction * window) rep.principal_contact = true;
          break;
        case ComponentKind::Capture:
          ++rep.capture_hits;
          if (rep.capture_samples.size() < 16) rep.capture_samples.push_back(p.value);
          break;
        case ComponentKind::Tricorn:
        case ComponentKind::Mandelbrot: {
          if (c.component == ComponentKind::Tricorn && c.component_period == d.period) break;
          auto c2 = classify(p, confirm);
          if (c2.component != c.component || c2.component_period != c.component_period) break;
          ScanHit hit{p.value, c.component_period};
          if (c.component == ComponentKind::Tricorn) {
            rep.tricorn_hits.push_back(hit);
          } else {
            rep.mandelbrot_hits.push_back(hit);
            // the symmetric cycle splits into a pair of the same length
            if (c.component_period == d.period) doubling_near[s] = true;
          }
          break;
        }
        default:
          break;
      }
      if (opt.refine_centers && (c.component == ComponentKind::Capture ||
                                 c.component == ComponentKind::Unknown))
        refine_near(p, t, d.period);
    }
  }
  // longest run of base points without a period-doubled neighbour
  size_t best_a = 0, best_b = 0, a = 0;
  for (size_t s = 0; s <= base.size(); ++s) {
    if (s == base.size() || doubling_near[s] || std::isnan(hs[s])) {
      if (s - a > best_b - best_a) {
        best_a = a;
        best_b = s;
      }
      a = s + 1;
    }
  }
  if (best_b > best_a) {
    rep.h1 = std::min(hs[best_a], hs[best_b - 1]);
    rep.h2 = std::max(hs[best_a], hs[best_b - 1]);
  }
  return rep;
}

// ------------------------------------------------------------ continuation

int characteristic_index(const ParabolicDatum& d, const Parameter& center,
                         const BoundaryTriple& triple) {
  int n = triple.period / 2;
  std::vector<cplx> pts = triple.points;
  constexpr int steps = 400;
  cplx a0 = center.value, a1 = d.param.value;
  for (int k = 1; k <= steps; ++k) {
    double s = double(k) / steps;
    if (k == steps) s = 1.0 - 1e-7;
    Map f(Parameter::make(center.family, a0 + s * (a1 - a0)));
    for (auto& z : pts) {
      auto r = solve_sigma_fixed(f, n, z);
      if (r) z = *r;
    }
  }
  int best = -1;
  double bd = 1e300;
  for (int k = 0; k < 3; ++k) {
    double dd = std::abs(pts[size_t(k)] - d.parabolic_point);
    if (dd < bd) {
      bd = dd;
      best = k;
    }
  }
  if (bd > 1e-2) fail(ErrorCode::NoConvergence, "boundary point continuation lost track");
  return best;
}

ComponentArcs component_arcs(const Parameter& center, int directions) {
  ComponentArcs out;
  out.triple = half_return_boundary_points(center);
  out.arcs.resize(3);
  for (int k = 0; k < directions; ++k) {
    cplx dir = std::polar(1.0, 2 * M_PI * k / directions);
    try {
      auto d = find_boundary_parabolic(center, dir, out.triple.period);
      int ci = characteristic_index(d, center, out.triple);
      if (!out.arcs[size_t(ci)]) out.arcs[size_t(ci)] = std::move(d);
    } catch (const Error&) {
    }
    if (out.arcs[0] && out.arcs[1] && out.arcs[2]) break;
  }
  return out;
}

ArcScan scan_component_arc(const ComponentArcs& ca, int index, double window,
                           const ScanOptions& opt) {
  if (index < 0 || index >= int(ca.arcs.size()))
    fail(ErrorCode::InvalidArgument, "arc index out of range");
  if (!ca.arcs[size_t(index)]) fail(ErrorCode::SeedingFailed, "arc not found for this index");
  const auto& start = *ca.arcs[size_t(index)];
  ArcScan out;
  out.index = index;
  out.tag = ca.triple.tags[size_t(index)];
  double mid = 0.0, quarter = 0.5;
  if (out.tag == PointTag::Root) {
    auto bands = full_basin_bands(cylinder_projection(start, 64, 4.0));
    const HeightBand* best = nullptr;
    for (int pass = 0; pass < 2 && !best; ++pass)
      for (const auto& b : bands)
        if ((pass == 1 || b.cls == 0) && (!best || b.hi - b.lo > best->hi - best->lo)) best = &b;
    if (best) {
      mid = 0.5 * (best->lo + best->hi);
      quarter = 0.25 * (best->hi - best->lo);
    }
  } else {
    std::vector<double> coarse;
    for (int k = -12; k <= 12; ++k) coarse.push_back(0.25 * k);
    auto tr = trace_arc(start, coarse);
    ScanOptions quick;
    quick.normals_per_sample = 1;
    quick.offsets = 32;
    quick.refine_centers = false;
    auto pre = arc_neighborhood_scan(tr.data, window, quick);
    if (pre.h2 > pre.h1) {
      mid = 0.5 * (pre.h1 + pre.h2);
      quarter = 0.25 * (pre.h2 - pre.h1);
    }
  }
  out.heights = {mid - quarter, mid, mid + quarter};
  auto tr = trace_arc(start, out.heights);
  if (tr.data.size() < 2) fail(ErrorCode::ContinuationStalled, "arc trace too short to scan");
  out.report = arc_neighborhood_scan(tr.data, window, opt);
  return out;
}

}  // namespace atlas
