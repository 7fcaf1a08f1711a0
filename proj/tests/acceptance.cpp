// Acceptance checks A1..A12: one PASS/FAIL line each, exit status 1 on any FAIL.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "atlas/render.hpp"
#include "atlas/visibility.hpp"

using namespace atlas;

namespace {

using clk = std::chrono::steady_clock;

double seconds_since(clk::time_point t) {
  return std::chrono::duration<double>(clk::now() - t).count();
}

int failures = 0;
std::vector<std::string> only;  // empty: run everything

void report(const char* id, bool ok, double secs, const std::string& detail) {
  std::printf("%s %s  %.1fs  %s\n", id, ok ? "PASS" : "FAIL", secs, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

void run(const char* id, const std::function<bool(std::string&)>& body) {
  if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) return;
  auto t0 = clk::now();
  std::string detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail += std::string(" exception: ") + e.what();
  }
  report(id, ok, seconds_since(t0), detail);
}

std::mt19937_64 rng(20240601);

cplx random_in_u() {
  std::uniform_real_distribution<double> re(-3.0, 3.0), im(0.0, 5.0);
  for (;;) {
    cplx a(re(rng), im(rng));
    if (2 * a.imag() * a.imag() - a.real() * a.real() - 2 > 1e-3) return a;
  }
}

cplx random_z() {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  return {u(rng), u(rng)};
}

// Newton map straight from the roots 1, -1, a, conj(a).
cplx newton_from_roots(cplx a, cplx z) {
  cplx r[4] = {1.0, -1.0, a, std::conj(a)};
  cplx s = 0.0;
  for (cplx x : r) s += 1.0 / (z - x);
  return z - 1.0 / s;
}

int real_roots_in_open_unit(const Eigen::Vector4d& c) {  // c0 + c1 x + c2 x^2 + c3 x^3
  Eigen::Matrix3d comp = Eigen::Matrix3d::Zero();
  comp(1, 0) = comp(2, 1) = 1.0;
  for (int i = 0; i < 3; ++i) comp(i, 2) = -c(i) / c(3);
  Eigen::EigenSolver<Eigen::Matrix3d> es(comp);
  int n = 0;
  for (int i = 0; i < 3; ++i) {
    auto ev = es.eigenvalues()(i);
    if (std::abs(ev.imag()) < 1e-9 && std::abs(ev.real()) < 1.0) ++n;
  }
  return n;
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) only.emplace_back(argv[i]);
  auto total = clk::now();
  std::printf("hardware threads: %u\n", std::thread::hardware_concurrency());

  run("A1", [](std::string& d) {
    double crit = 0, equi = 0, mult = 0, quot = 0;
    int bad_poles = 0;
    for (int k = 0; k < 100; ++k) {
      cplx a = random_in_u();
      auto p = Parameter::newton(a);
      Map f(p);
      auto cp = free_critical_points(p);
      for (cplx c : {cp.c_plus, cp.c_minus}) {
        cplx dz;
        f.eval(c, dz);
        crit = std::max(crit, std::abs(dz));
      }
      for (int j = 0; j < 100; ++j) {
        cplx z = random_z();
        cplx w = f(z);
        if (std::abs(w) > 1e6) continue;
        equi = std::max(equi, std::abs(f(std::conj(z)) - std::conj(w)));
        quot = std::max(quot, std::abs(w - newton_from_roots(a, z)) / std::max(1.0, std::abs(w)));
      }
      double r = a.real(), m = std::norm(a);
      Eigen::Vector4d fp(2 * r, 2 * (m - 1), -6 * r, 4);
      int n = real_roots_in_open_unit(fp);
      double pr = newton_poles(a).p_real;
      if (n != 1 || !(std::abs(pr) < 1)) ++bad_poles;
      auto e = evaluate(p, SpherePoint::infinity());
      mult = std::max(mult, std::abs(e.dw - 4.0 / 3.0));
      if (!e.w.is_infinity()) ++bad_poles;
    }
    d = fmt("crit=%.1e", crit) + fmt(" equiv=%.1e", equi) + fmt(" quotient=%.1e", quot) +
        fmt(" mult_inf_err=%.1e", mult) + " bad_pole_params=" + std::to_string(bad_poles);
    return crit < 1e-10 && equi < 1e-10 && quot < 1e-12 && mult < 1e-10 && bad_poles == 0;
  });

  run("A2", [](std::string& d) {
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    double fix0 = 0, cinf = 0, equi = 0, crit = 0;
    bool inf_fixed = true;
    for (int k = 0; k < 100; ++k) {
      cplx q(u(rng), u(rng));
      if (std::abs(q) < 0.05) continue;
      auto p = Parameter::antipodal(q);
      Map f(p);
      fix0 = std::max(fix0, std::abs(f(0.0)));
      inf_fixed = inf_fixed && evaluate(p, SpherePoint::infinity()).w.is_infinity();
      auto cp = free_critical_points(p);
      cinf = std::max(cinf, std::abs(cp.c_minus - (-1.0 / std::conj(cp.c_plus))) /
                                std::max(1.0, std::abs(cp.c_minus)));
      cinf = std::max(cinf, std::abs(cp.c_plus - (-1.0 / std::conj(cp.c_minus))) /
                                std::max(1.0, std::abs(cp.c_plus)));
      cplx dz;
      f.eval(cp.c_plus, dz);
      crit = std::max(crit, std::abs(dz));
      for (int j = 0; j < 100; ++j) {
        cplx z = random_z();
        cplx w = f(z);
        if (std::abs(w) > 1e6 || std::abs(w) < 1e-6 || std::abs(z) < 1e-3) continue;
        cplx lhs = f(-1.0 / std::conj(z)), rhs = -1.0 / std::conj(w);
        equi = std::max(equi, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
      }
    }
    d = fmt("f(0)=%.1e", fix0) + std::string(" inf_fixed=") + (inf_fixed ? "yes" : "no") +
        fmt(" c_inf-eta(c_0)=%.1e", cinf) + fmt(" crit=%.1e", crit) + fmt(" equiv=%.1e", equi);
    return fix0 < 1e-10 && inf_fixed && cinf < 1e-10 && crit < 1e-10 && equi < 1e-10;
  });

  run("A3", [](std::string& d) {
    double worst = 0;
    std::uniform_real_distribution<double> t(1.01, 8.0);
    for (int k = 0; k < 20; ++k) {
      Map f(Parameter::newton({0.0, t(rng)}));
      for (int j = 0; j < 100; ++j) {
        cplx z = random_z();
        cplx w = f(z);
        if (std::abs(w) > 1e6) continue;
        worst = std::max(worst, std::abs(f(-z) + w));
      }
    }
    d = fmt("max |N(-z)+N(z)|=%.1e", worst);
    return worst < 1e-10;
  });

  run("A4", [](std::string& d) {
    bool ok = true;
    for (int n : {1, 2, 3}) {
      auto rep = center_search_newton(n, 1.001, 10.0);
      int good = 0;
      std::string list;
      for (cplx a : rep.centers) {
        double res = newton_center_residual(a, n);
        auto c = classify(Parameter::newton(a), tier_budget(Tier::Analysis));
        bool hit = res < 1e-10 && c.component == ComponentKind::Tricorn &&
                   c.component_period == 2 * n;
        good += hit;
        list += " " + format_complex(a) + fmt("(res %.0e)", res);
      }
      d += " n=" + std::to_string(n) + ": " + std::to_string(good) + " centers" + list + ";";
      if (n >= 2 && good < 1) ok = false;
    }
    return ok;
  });

  cplx a2 = center_search_newton(2, 1.001, 10.0).centers.at(0);

  run("A5", [a2](std::string& d) {
    const int N = 32;
    const double half = 0.05;
    int decided = 0, disagree = 0;
    long oracle_budget = 10 * tier_budget(Tier::Standard);
    for (int j = 0; j < N; ++j)
      for (int i = 0; i < N; ++i) {
        cplx a = a2 + cplx(-half + (i + 0.5) * 2 * half / N, -half + (j + 0.5) * 2 * half / N);
        auto p = Parameter::newton(a);
        if (!p.in_u) continue;
        auto c = classify(p, tier_budget(Tier::Standard));
        if (!c.decided()) continue;
        ++decided;
        // brute force: plain iteration of the critical orbit
        Map f(p);
        cplx z = free_critical_points(p).c_plus;
        cplx roots[4] = {1.0, -1.0, a, std::conj(a)};
        int hit = -1;
        for (long it = 0; it < oracle_budget && hit < 0; ++it) {
          z = f(z);
          for (int r = 0; r < 4; ++r)
            if (std::abs(z - roots[r]) < 1e-9) hit = r;
        }
        bool agree;
        if (c.kind == VerdictKind::FixedBasin) {
          static const Target order[4] = {Target::One, Target::MinusOne, Target::A, Target::ABar};
          agree = hit >= 0 && order[hit] == c.target;
        } else {
          int period = 0;
          if (hit < 0)
            for (int q = 1; q <= 64 && !period; ++q)
              if (std::abs(f.iterate(z, q) - z) < 1e-7) period = q;
          agree = period == c.cycle.period;
        }
        disagree += !agree;
      }
    d = "decided=" + std::to_string(decided) + " disagreements=" + std::to_string(disagree);
    return decided > 0 && disagree == 0;
  });

  // Simple parabolic data used by A6: arcs of a2 and of the antipodal tongue center.
  std::vector<ParabolicDatum> suite;
  auto tongue = center_search_antipodal(1, default_antipodal_seeds());
  for (const auto& center : {Parameter::newton(a2), Parameter::antipodal(tongue.centers.at(0))}) {
    auto ca = component_arcs(center);
    for (const auto& s : ca.arcs) {
      if (!s) continue;
      suite.push_back(*s);
      auto tr = trace_arc(*s, {-1.0, 1.0});
      for (const auto& dd : tr.data) suite.push_back(dd);
    }
  }

  run("A6", [&suite](std::string& d) {
    double fe = 0, beta = 0, hsum = 0, drift = 0;
    int used = 0;
    for (const auto& dat : suite) {
      if (dat.petal_kind != PetalKind::Simple) continue;
      ++used;
      auto co = dat.coordinate();
      // points already inside the asymptotic region: no orbit is shared
      for (double ang : {-0.6, -0.3, 0.0, 0.3, 0.6}) {
        cplx u = 2.0 * co.u_min * std::polar(1.0, ang);
        cplx z = co.z1 - 1.0 / (co.A * u);
        cplx p0 = attracting_fatou_coordinate(dat, z).psi;
        cplx p1 = attracting_fatou_coordinate(dat, dat.ret(z)).psi;
        fe = std::max(fe, std::abs(p1 - p0 - 1.0));
      }
      beta = std::max(beta, std::abs(dat.norm.beta.real() - 0.5));
      double hp = critical_ecalle_height(dat, CriticalChoice::Plus).h;
      double hm = critical_ecalle_height(dat, CriticalChoice::Minus).h;
      hsum = std::max(hsum, std::abs(hp + hm));
      double h2 = critical_ecalle_height(dat, CriticalChoice::Plus, 2.0).h;
      drift = std::max(drift, std::abs(hp - h2));
    }
    d = "data=" + std::to_string(used) + fmt(" functional=%.1e", fe) + fmt(" |Re(beta)-1/2|=%.1e", beta) +
        fmt(" |h+ + h-|=%.1e", hsum) + fmt(" depth_drift=%.1e", drift);
    return used > 0 && fe < 1e-6 && beta < 1e-6 && hsum < 1e-6 && drift < 1e-6;
  });

  run("A7", [a2](std::string& d) {
    auto start = find_boundary_parabolic(Parameter::newton(a2), std::polar(1.0, M_PI / 3), 4);
    std::vector<double> targets{-0.5, 0.0, 0.5};
    auto tr = trace_arc(start, targets);
    double err = 0;
    for (size_t i = 0; i < tr.data.size(); ++i)
      err = std::max(err, std::abs(critical_ecalle_height(tr.data[i]).h - targets[i]));
    auto mono = [](const std::vector<EcalleSample>& path, double sign) {
      for (size_t i = 1; i < path.size(); ++i)
        if (!((path[i].h - path[i - 1].h) * sign > 0)) return false;
      return true;
    };
    auto lo = trace_arc(start, {-1e5});
    auto hi = trace_arc(start, {1e5});
    bool monotone = mono(lo.path, -1.0) && mono(hi.path, 1.0);
    d = "reached=" + std::to_string(tr.data.size()) + fmt(" recompute_err=%.1e", err) +
        " monotone=" + (monotone ? "yes" : "no") + " cusp_low=" + (lo.cusp_reached ? "yes" : "no") +
        " cusp_high=" + (hi.cusp_reached ? "yes" : "no");
    return tr.data.size() == 3 && err < 1e-4 && monotone && lo.cusp_reached && hi.cusp_reached;
  });

  run("A8", [a2](std::string& d) {
    auto start = find_boundary_parabolic(Parameter::newton(a2), std::polar(1.0, M_PI / 3), 4);
    cplx n = arc_normal(start);
    double transit = 0, prev = INFINITY;
    bool decreasing = true;
    for (double t : {1e-3, 1e-4, 1e-5}) {
      auto ph = repelling_fatou_and_phase(start.param.value + t * n, start);
      transit = std::max(transit, std::abs(ph.transit_height - ph.incoming_height));
      decreasing = decreasing && ph.lifted_phase < prev;
      prev = ph.lifted_phase;
      d += fmt(" phase(%.0e)=", t) + fmt("%.3f", ph.lifted_phase);
    }
    d += fmt(" transit_err=%.1e", transit);
    return transit < 1e-4 && decreasing;
  });

  run("A9", [a2](std::string& d) {
    auto p = Parameter::newton(a2);
    auto tri = half_return_boundary_points(p);
    int coroots = 0, visible = 0, invisible = 0, inv_idx = -1;
    for (size_t k = 0; k < tri.points.size(); ++k) {
      if (tri.tags[k] != PointTag::CoRoot) continue;
      ++coroots;
      auto v = coroot_visibility(p, tri.points[k], 1e-6);
      if (v.state == VisibilityState::Visible &&
          (v.witness == Target::One || v.witness == Target::MinusOne))
        ++visible;
      if (v.state == VisibilityState::Invisible) {
        ++invisible;
        inv_idx = int(k);
      }
    }
    // fixed by z -> -conj(z)
    bool sym = inv_idx >= 0 &&
               std::abs(-std::conj(tri.points[size_t(inv_idx)]) - tri.points[size_t(inv_idx)]) < 1e-8;
    d = "coroots=" + std::to_string(coroots) + " visible=" + std::to_string(visible) +
        " invisible=" + std::to_string(invisible) + " invisible_is_symmetric=" + (sym ? "yes" : "no");
    return tri.points.size() == 3 && coroots == 3 && visible == 2 && invisible == 1 && sym;
  });

  run("A10", [&tongue](std::string& d) {
    auto center = Parameter::antipodal(tongue.centers.at(0));
    auto ca = component_arcs(center);
    int co = -1;
    for (int k = 0; k < 3; ++k)
      if (ca.triple.tags[size_t(k)] == PointTag::CoRoot) co = k;
    if (co < 0) {
      d = "no co-root in the boundary triple";
      return false;
    }
    auto vis = coroot_visibility(center, ca.triple.points[size_t(co)]);
    d = "center=" + format_complex(center.value) + " coroot=" + visibility_name(vis.state);
    bool ok = vis.state == VisibilityState::Invisible;
    auto b = scan_component_arc(ca, co);
    int big = 0;
    for (const auto& h : b.report.tricorn_hits) big += h.period > 2;
    d += fmt(" bounded[h %.2f", b.heights.front()) + fmt("..%.2f]:", b.heights.back()) +
         " principal=" + (b.report.principal_contact ? "yes" : "no") +
         " capture=" + std::to_string(b.report.capture_hits) + " tricorn>2=" + std::to_string(big);
    ok = ok && !b.report.principal_contact && b.report.capture_hits >= 1 && big >= 1;
    for (int k = 0; k < 3; ++k) {
      if (k == co) continue;
      auto r = scan_component_arc(ca, k);
      d += " root" + std::to_string(k) + fmt("[h %.2f", r.heights.front()) +
           fmt("..%.2f]:", r.heights.back()) +
           " principal=" + (r.report.principal_contact ? "yes" : "no");
      ok = ok && r.report.principal_contact;
    }
    return ok;
  });

  WorldConfig world;
  Viewport wv{world.newton_center, 2 * world.newton_half / 512, 512, 512};
  Raster world_raster;
  double world_secs = 0;
  {
    auto t0 = clk::now();
    RenderOptions opt;
    world_raster = render_parameter(Family::Newton, wv, opt);
    world_secs = seconds_since(t0);
  }

  run("A11", [&](std::string& d) {
    int total_pts = 0, matched = 0;
    auto outside = [&](int i, int j) {
      return world_raster.at(i, j).kind == PixelKind::OutsideDomain;
    };
    {
      // arc-length sampling of the upper branch of 2 y^2 = x^2 + 2, which is
      // the whole boundary of the domain
      double x = -world.newton_half * 1.5;
      while (x < world.newton_half * 1.5) {
        double y = std::sqrt((x * x + 2) / 2);
        double px, py;
        wv.to_pixel({x, y}, px, py);
        double slope = x / (2 * y);
        x += 0.25 * wv.scale / std::sqrt(1 + slope * slope);
        if (px < 1 || py < 1 || px >= 511 || py >= 511) continue;
        ++total_pts;
        int ci = int(std::floor(px)), cj = int(std::floor(py));
        bool in = false, out = false;
        for (int dj = -1; dj <= 1; ++dj)
          for (int di = -1; di <= 1; ++di) (outside(ci + di, cj + dj) ? out : in) = true;
        matched += in && out;
      }
    }
    double frac = total_pts ? double(matched) / total_pts : 0.0;
    d = fmt("boundary within 1px on %.2f%%", 100 * frac) + " of " + std::to_string(total_pts) +
        " curve samples";
    return frac >= 0.95;
  });

  run("A12", [&](std::string& d) {
    TileKey key;
    key.zoom = 2;
    key.x = 1;
    key.y = 1;
    std::string ref = encode_png(render_tile(key, world, 1));
    bool same = true;
    for (int th : {1, 2, 4, 0}) same = same && encode_png(render_tile(key, world, th)) == ref;
    std::string full1 = encode_png(world_raster);
    RenderOptions o1;
    o1.threads = 1;
    same = same && encode_png(render_parameter(Family::Newton, wv, o1)) == full1;
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    d = std::string("byte_identical=") + (same ? "yes" : "no") +
        fmt(" world512_standard=%.1fs", world_secs) + " on " + std::to_string(hw) + " thread(s)";
    return same && world_secs < 60.0;
  });

  std::printf("total %.1fs, %d failing\n", seconds_since(total), failures);
  return failures ? 1 : 0;
}
