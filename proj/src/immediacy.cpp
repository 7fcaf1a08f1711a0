#include "immediacy.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace atlas {

// Newton: 0..3 = 1, -1, a, conj(a). Antipodal: 0 = zero, 1 = infinity.
int target_index(Family fam, Target t) {
  if (fam == Family::Newton) {
    switch (t) {
      case Target::One: return 0;
      case Target::MinusOne: return 1;
      case Target::A: return 2;
      case Target::ABar: return 3;
      default: return -1;
    }
  }
  return t == Target::Zero ? 0 : (t == Target::Infinity ? 1 : -1);
}

int quick_target(const Map& f, cplx z, int budget, int* iters) {
  constexpr double eps = 1e-6;
  if (f.family == Family::Newton) {
    cplx a = f.par, ac = std::conj(f.par);
    for (int k = 0; k <= budget; ++k) {
      int t = -1;
      if (std::abs(z - 1.0) < eps) t = 0;
      else if (std::abs(z + 1.0) < eps) t = 1;
      else if (std::abs(z - a) < eps) t = 2;
      else if (std::abs(z - ac) < eps) t = 3;
      if (t >= 0) {
        if (iters) *iters = k;
        return t;
      }
      z = f(z);
      if (!std::isfinite(std::abs(z))) break;
    }
    return -1;
  }
  for (int k = 0; k <= budget; ++k) {
    double r = std::abs(z);
    if (r < eps || r > 1.0 / eps || !std::isfinite(r)) {
      if (iters) *iters = k;
      return r < eps ? 0 : 1;
    }
    z = f(z);
  }
  return -1;
}

namespace {

constexpr int kQuickBudget = 600;

struct PathProbe {
  const Map& f;
  int want;
  int budget = kQuickBudget;
  int evaluated = 0;
  int cap = 4000;

  bool ok(cplx z, int& it) {
    ++evaluated;
    return quick_target(f, z, budget, &it) == want;
  }

  bool segment(cplx a, cplx b) {
    constexpr int n0 = 33;
    struct S { double t; int it; };
    std::vector<S> s;
    s.reserve(n0);
    for (int i = 0; i < n0; ++i) {
      double t = double(i) / (n0 - 1);
      int it;
      if (!ok(a + t * (b - a), it)) return false;
      s.push_back({t, it});
    }
    // refine where the settle time jumps: a Julia crossing hides there
    for (int depth = 0; depth < 10; ++depth) {
      std::vector<S> next;
      bool refined = false;
      for (size_t i = 0; i + 1 < s.size(); ++i) {
        next.push_back(s[i]);
        if (std::abs(s[i].it - s[i + 1].it) > 1) {
          double t = 0.5 * (s[i].t + s[i + 1].t);
          int it;
          if (!ok(a + t * (b - a), it)) return false;
          next.push_back({t, it});
          refined = true;
        }
      }
      next.push_back(s.back());
      s.swap(next);
      if (!refined || evaluated > cap) break;
    }
    return true;
  }
};

bool flood_fill_test(const Map& f, cplx start, cplx anchor, int want) {
  double x0 = std::min(start.real(), anchor.real());
  double x1 = std::max(start.real(), anchor.real());
  double y0 = std::min(start.imag(), anchor.imag());
  double y1 = std::max(start.imag(), anchor.imag());
  double span = std::max({x1 - x0, y1 - y0, 0.5});
  double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
  double half = 0.75 * span;
  constexpr int n = 400;
  double h = 2 * half / n;
  auto idx = [&](cplx z, int& i, int& j) {
    i = int(std::floor((z.real() - (cx - half)) / h));
    j = int(std::floor((z.imag() - (cy - half)) / h));
    return i >= 0 && j >= 0 && i < n && j < n;
  };
  std::vector<signed char> mark(n * n, 0);  // 0 unknown, 1 in, 2 out, 3 seen
  auto in = [&](int i, int j) {
    signed char& m = mark[j * n + i];
    if (m == 0) {
      cplx z(cx - half + (i + 0.5) * h, cy - half + (j + 0.5) * h);
      m = quick_target(f, z, 2000) == want ? 1 : 2;
    }
    return m == 1 || m == 3;
  };
  int si, sj, ti, tj;
  if (!idx(anchor, si, sj) || !idx(start, ti, tj)) return false;
  if (!in(si, sj)) return false;
  std::queue<std::pair<int, int>> q;
  q.push({si, sj});
  mark[sj * n + si] = 3;
  while (!q.empty()) {
    auto [i, j] = q.front();
    q.pop();
    if (i == ti && j == tj) return true;
    const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      int a = i + di[k], b = j + dj[k];
      if (a < 0 || b < 0 || a >= n || b >= n) continue;
      if (mark[b * n + a] == 3) continue;
      if (in(a, b)) {
        mark[b * n + a] = 3;
        q.push({a, b});
      }
    }
  }
  return false;
}

// A basin component that meets one of its own forward images is periodic, so
// it is the immediate one.
bool joins_forward_image(const Map& f, PathProbe& probe, cplx z) {
  cplx w = z;
  for (int m = 1; m <= 8; ++m) {
    w = f(w);
    if (!std::isfinite(std::abs(w))) return false;
    if (probe.segment(z, w)) return true;
  }
  return false;
}

}  // namespace

bool in_immediate_basin(const Parameter& p, cplx start, Target t,
                        ImmediacyTest mode) {
  Map f(p);
  // slow transits near parabolic parameters need a matching budget
  auto budget_for = [&](cplx z) {
    int it = 0;
    if (quick_target(f, z, 400000, &it) < 0) return kQuickBudget;
    return std::max(kQuickBudget, 2 * it + 100);
  };
  if (p.family == Family::Newton) {
    int want = target_index(p.family, t);
    if (want > 1) return false;
    cplx root = want == 0 ? 1.0 : -1.0;
    PathProbe probe{f, want, budget_for(start)};
    // the real line minus the real pole lies in the two immediate basins
    double pr = newton_poles(p.value).p_real;
    double x = start.real();
    bool foot_ok = want == 0 ? x > pr : x < pr;
    if (foot_ok && probe.segment(start, cplx(x, 0.0))) return true;
    if (probe.segment(start, root)) return true;
    cplx z = start;
    for (int k = 0; k < 16 && std::abs(z - root) > 1e-3; ++k) {
      cplx w = f(z);
      if (!probe.segment(z, w)) break;
      z = w;
      if (std::abs(z - root) <= 1e-3) return true;
    }
    if (joins_forward_image(f, probe, start)) return true;
    if (mode == ImmediacyTest::Thorough) {
      cplx anchor = foot_ok ? cplx(x, 0.0) : root;
      return flood_fill_test(f, start, anchor, want);
    }
    return false;
  }
  // antipodal: B_inf^imm = eta(B_0^imm)
  cplx s = t == Target::Infinity ? f.inv(start) : start;
  PathProbe probe{f, 0, budget_for(s)};
  if (probe.segment(s, 0.0)) return true;
  cplx z = s;
  for (int k = 0; k < 16 && std::abs(z) > 1e-3; ++k) {
    cplx w = f(z);
    if (!probe.segment(z, w)) break;
    z = w;
    if (std::abs(z) <= 1e-3) return true;
  }
  if (joins_forward_image(f, probe, s)) return true;
  if (mode == ImmediacyTest::Thorough) return flood_fill_test(f, s, 0.0, 0);
  return false;
}

}  // namespace atlas
