#include <algorithm>
#include <cmath>
#include <optional>

#include <Eigen/Dense>

#include "arc_system.hpp"
#include "atlas/parabolic.hpp"

namespace atlas {

namespace {

using Vec4 = Eigen::Vector4d;
using Mat34 = Eigen::Matrix<double, 3, 4>;

constexpr double kCuspIndicator = 400.0;

struct Node {
  Vec4 X;
  double h = 0.0;
  ParabolicDatum d;
};

struct Tracer {
  ArcSystem sys;
  Family fam;
  int period;

  Eigen::Vector3d E(const Vec4& X) const {
    return sys.residual(cplx(X[0], X[1]), cplx(X[2], X[3]));
  }

  Mat34 J(const Vec4& X) const {
    Mat34 m;
    for (int j = 0; j < 4; ++j) {
      double h = 1e-7 * std::max(1.0, std::abs(X[j]));
      Vec4 a = X, b = X;
      a[j] += h;
      b[j] -= h;
      m.col(j) = (E(a) - E(b)) / (2 * h);
    }
    return m;
  }

  static Vec4 kernel(const Mat34& m) {
    Vec4 t;
    for (int i = 0; i < 4; ++i) {
      Eigen::Matrix3d minor;
      int c = 0;
      for (int j = 0; j < 4; ++j)
        if (j != i) minor.col(c++) = m.col(j);
      t[i] = ((i % 2) ? -1.0 : 1.0) * minor.determinant();
    }
    return t.normalized();
  }

  std::optional<Vec4> correct(const Vec4& Xp, const Vec4& t) const {
    Vec4 X = Xp;
    for (int it = 0; it < 12; ++it) {
      Eigen::Vector3d e = E(X);
      Eigen::Matrix4d M;
      M.topRows<3>() = J(X);
      M.row(3) = t.transpose();
      Vec4 rhs;
      rhs.head<3>() = -e;
      rhs[3] = -t.dot(X - Xp);
      Vec4 dX = M.fullPivLu().solve(rhs);
      if (!dX.allFinite()) return std::nullopt;
      X += dX;
      if (dX.norm() < 1e-13 * std::max(1.0, X.norm())) {
        if (E(X).norm() < 1e-10) return X;
        return std::nullopt;
      }
    }
    if (E(X).norm() < 1e-12) return X;
    return std::nullopt;
  }

  // Datum and height at a converged point; nullopt near a cusp.
  std::optional<Node> node(const Vec4& X) const {
    try {
      auto p = Parameter::make(fam, cplx(X[2], X[3]));
      auto d = make_datum(p, cplx(X[0], X[1]), period);
      if (d.petal_kind != PetalKind::Simple || cusp_indicator(d) > kCuspIndicator)
        return std::nullopt;
      double h = critical_ecalle_height(d).h;
      return Node{X, h, std::move(d)};
    } catch (const Error&) {
      return std::nullopt;
    }
  }
};

EcalleSample sample_of(const Node& n) {
  return {n.d.param.value, n.h, n.d.multiplier_residual, n.d.petal_kind};
}

}  // namespace

ArcTrace trace_arc(const ParabolicDatum& start, const std::vector<double>& targets) {
  if (start.petal_kind != PetalKind::Simple)
    fail(ErrorCode::InvalidArgument, "arc tracing starts from a simple parabolic datum");
  Tracer tr{{start.param.family, start.half()}, start.param.family, start.period};
  Vec4 X0(start.parabolic_point.real(), start.parabolic_point.imag(),
          start.param.value.real(), start.param.value.imag());
  auto first = tr.node(X0);
  if (!first) fail(ErrorCode::CuspReached, "start datum is already degenerate");

  ArcTrace out;
  out.samples.resize(targets.size());
  out.data.resize(targets.size());
  std::vector<char> done(targets.size(), 0);
  out.path.push_back(sample_of(*first));

  for (int dir : {+1, -1}) {
    // targets on this side of the start height, nearest first
    std::vector<size_t> order;
    for (size_t i = 0; i < targets.size(); ++i) {
      double dt = targets[i] - first->h;
      if ((dir > 0 && dt >= 0) || (dir < 0 && dt < 0)) order.push_back(i);
    }
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      return std::abs(targets[a] - first->h) < std::abs(targets[b] - first->h);
    });
    if (order.empty()) continue;

    Node cur = *first;
    Vec4 t = Tracer::kernel(tr.J(cur.X));
    bool oriented = false;
    double ds = 2e-3;
    size_t next = 0;
    int steps = 0;
    while (next < order.size()) {
      double target = targets[order[next]];
      if (std::abs(cur.h - target) < 1e-9) {
        out.samples[order[next]] = sample_of(cur);
        out.data[order[next]] = cur.d;
        done[order[next]] = 1;
        ++next;
        continue;
      }
      if (++steps > 20000 || ds < 1e-13) {
        out.stalled = true;
        break;
      }
      auto Xn = tr.correct(cur.X + ds * t, t);
      std::optional<Node> nn;
      if (Xn) nn = tr.node(*Xn);
      if (!nn) {
        // either a cusp ahead or too long a step
        if (ds < 1e-9) {
          out.cusp_reached = true;
          break;
        }
        ds *= 0.5;
        continue;
      }
      double dh = nn->h - cur.h;
      if (!oriented) {
        if (dh * dir < 0) {
          t = -t;
          oriented = true;
          continue;
        }
        oriented = true;
      }
      double hs = std::max(1.0, std::abs(cur.h));
      if (dh * dir <= 0 || std::abs(dh) > 0.05 * hs) {
        ds *= 0.5;
        continue;
      }
      if ((nn->h - target) * dir >= 0) {
        // bracketed: secant on the step length
        double s0 = 0.0, s1 = ds, h0 = cur.h - target, h1 = nn->h - target;
        Node best = *nn;
        for (int it = 0; it < 60 && std::abs(best.h - target) > 1e-10; ++it) {
          double s = s1 - h1 * (s1 - s0) / (h1 - h0);
          if (!(s > std::min(s0, s1) && s < std::max(s0, s1))) s = 0.5 * (s0 + s1);
          auto Xs = tr.correct(cur.X + s * t, t);
          if (!Xs) break;
          auto ns = tr.node(*Xs);
          if (!ns) break;
          if (std::abs(ns->h - target) < std::abs(best.h - target)) best = *ns;
          double hs = ns->h - target;
          if ((hs < 0) == (h0 < 0)) {
            s0 = s;
            h0 = hs;
          } else {
            s1 = s;
            h1 = hs;
          }
        }
        Vec4 tn = Tracer::kernel(tr.J(best.X));
        if (tn.dot(t) < 0) tn = -tn;
        t = tn;
        cur = best;
        out.path.push_back(sample_of(cur));
        out.samples[order[next]] = sample_of(cur);
        out.data[order[next]] = cur.d;
        done[order[next]] = 1;
        ++next;
        continue;
      }
      Vec4 tn = Tracer::kernel(tr.J(nn->X));
      if (tn.dot(t) < 0) tn = -tn;
      t = tn;
      cur = *nn;
      out.path.push_back(sample_of(cur));
      if (std::abs(dh) < 0.01 * hs) ds = std::min(ds * 1.5, 0.05);
    }
  }
  // drop targets that were not reached
  ArcTrace res;
  res.cusp_reached = out.cusp_reached;
  res.stalled = out.stalled;
  res.path = out.path;
  for (size_t i = 0; i < targets.size(); ++i)
    if (done[i]) {
      res.samples.push_back(out.samples[i]);
      res.data.push_back(out.data[i]);
    }
  return res;
}

}  // namespace atlas

namespace atlas {

std::optional<ParabolicDatum> arc_point_between(const ParabolicDatum& a,
                                                const ParabolicDatum& b, double s) {
  if (a.param.family != b.param.family || a.period != b.period)
    fail(ErrorCode::InvalidArgument, "data from different arcs");
  Tracer tr{{a.param.family, a.half()}, a.param.family, a.period};
  Vec4 Xa(a.parabolic_point.real(), a.parabolic_point.imag(), a.param.value.real(),
          a.param.value.imag());
  Vec4 Xb(b.parabolic_point.real(), b.parabolic_point.imag(), b.param.value.real(),
          b.param.value.imag());
  Vec4 t = Xb - Xa;
  if (t.norm() == 0.0) return a;
  t.normalize();
  auto X = tr.correct(Xa + s * (Xb - Xa), t);
  if (!X) return std::nullopt;
  auto n = tr.node(*X);
  if (!n) return std::nullopt;
  return n->d;
}

}  // namespace atlas
