#include <algorithm>
#include <cmath>

#include "atlas/family.hpp"
#include "common.hpp"
#include "doctest.h"

using namespace atlas;
using testing_support::uniform_point;

namespace {

// z - f/f' with f' from the logarithmic derivative over the four roots
cplx newton_step_from_roots(cplx a, cplx z) {
  cplx s = 1.0 / (z - 1.0) + 1.0 / (z + 1.0) + 1.0 / (z - a) + 1.0 / (z - std::conj(a));
  return z - 1.0 / s;
}

cplx random_u() {
  for (;;) {
    cplx a = uniform_point(-4, 4, 0, 6);
    if (2 * a.imag() * a.imag() - a.real() * a.real() - 2 > 1e-3) return a;
  }
}

}  // namespace

TEST_SUITE("family") {
  TEST_CASE("quotient form matches a root-product Newton step") {
    for (int k = 0; k < 50; ++k) {
      cplx a = random_u();
      Map f(Parameter::newton(a));
      for (int j = 0; j < 50; ++j) {
        cplx z = uniform_point(-3, 3, -3, 3);
        cplx w = f(z);
        if (std::abs(w) > 1e6) continue;
        CHECK(std::abs(w - newton_step_from_roots(a, z)) <= 1e-12 * std::max(1.0, std::abs(w)));
      }
    }
  }

  TEST_CASE("free critical points are the zeros of f''") {
    for (int k = 0; k < 50; ++k) {
      cplx a = random_u();
      double r = a.real(), m = std::norm(a);
      // f'' = 12 z^2 - 12 r z + 2 (m - 1)
      cplx disc = std::sqrt(cplx(144 * r * r - 96 * (m - 1)));
      cplx z1 = (12 * r + disc) / 24.0, z2 = (12 * r - disc) / 24.0;
      auto cp = free_critical_points(Parameter::newton(a));
      double d1 = std::abs(cp.c_plus - z1) + std::abs(cp.c_minus - z2);
      double d2 = std::abs(cp.c_plus - z2) + std::abs(cp.c_minus - z1);
      CHECK(std::min(d1, d2) < 1e-10);
      CHECK(std::abs(cp.c_minus - std::conj(cp.c_plus)) < 1e-10);
    }
  }

  TEST_CASE("conjugate-criticals discriminant agrees with region membership") {
    int checked = 0;
    for (int i = -40; i <= 40; ++i)
      for (int j = -40; j <= 40; ++j) {
        cplx a(0.1 * i + 0.013, 0.1 * j + 0.007);
        double disc = 9 * 2 * (a * a).real() - 6 * std::norm(a) + 24;
        double ineq = 2 * a.imag() * a.imag() - a.real() * a.real() - 2;
        if (std::abs(disc) < 1e-6 || std::abs(ineq) < 1e-6) continue;
        auto reg = region_membership(a).region;
        CHECK((disc < 0) == (reg != Region::Outside));
        if (ineq > 0) CHECK(reg == (a.imag() > 0 ? Region::InU : Region::InConjugateU));
        ++checked;
      }
    CHECK(checked > 6000);
  }

  TEST_CASE("symmetry locus flag needs an exact zero real part") {
    CHECK(region_membership({0.0, 2.0}).on_symmetry_locus);
    CHECK_FALSE(region_membership({1e-300, 2.0}).on_symmetry_locus);
    CHECK_FALSE(region_membership({0.0, -2.0}).on_symmetry_locus);
    CHECK_FALSE(region_membership({0.0, 0.5}).on_symmetry_locus);
  }

  TEST_CASE("boundary of U is outside") {
    // 2 y^2 = x^2 + 2 at x = 0
    CHECK(region_membership({0.0, 1.0}).region == Region::Outside);
    CHECK_FALSE(Parameter::newton({0.0, 1.0}).in_u);
  }

  TEST_CASE("operations needing conjugate criticals reject parameters outside U") {
    CHECK_THROWS_AS(free_critical_points(Parameter::newton({2.0, 0.0})), Error);
    CHECK_THROWS_AS(newton_poles({2.0, 0.0}), Error);
  }

  TEST_CASE("Newton poles: one real pole in (-1, 1) and a conjugate pair") {
    for (int k = 0; k < 50; ++k) {
      cplx a = random_u();
      auto poles = newton_poles(a);
      CHECK(std::abs(poles.p_real) < 1.0);
      for (cplx z : {cplx(poles.p_real), poles.p_pair, std::conj(poles.p_pair)})
        CHECK(std::abs(newton_fprime(a, z)) < 1e-9 * std::max(1.0, std::norm(a)));
    }
  }

  TEST_CASE("antipodal criticals satisfy f'(c) = 0 by finite differences") {
    for (int k = 0; k < 50; ++k) {
      cplx q = uniform_point(-4, 4, -4, 4);
      if (std::abs(q) < 0.1) continue;
      auto p = Parameter::antipodal(q);
      Map f(p);
      auto cp = free_critical_points(p);
      for (cplx c : {cp.c_plus, cp.c_minus}) {
        double h = 1e-4 * std::max(1.0, std::abs(c));
        cplx d = (f(c + h) - f(c - h)) / (2 * h);
        CHECK(std::abs(d) < 1e-6 * std::max(1.0, std::abs(f(c)) / std::abs(c)));
      }
    }
  }

  TEST_CASE("involutions commute with the maps") {
    for (int k = 0; k < 30; ++k) {
      auto pn = Parameter::newton(random_u());
      cplx q = uniform_point(-3, 3, -3, 3);
      auto pa = Parameter::antipodal(q);
      for (int j = 0; j < 30; ++j) {
        cplx z = uniform_point(-2, 2, -2, 2);
        auto lhs = evaluate(pn, involution(pn, SpherePoint::finite(z)));
        auto rhs = involution(pn, evaluate(pn, SpherePoint::finite(z)).w);
        if (lhs.w.chart == rhs.chart) CHECK(std::abs(lhs.w.z - rhs.z) < 1e-9 * std::max(1.0, std::abs(rhs.z)));
        auto la = evaluate(pa, involution(pa, SpherePoint::finite(z))).w.normalized();
        auto ra = involution(pa, evaluate(pa, SpherePoint::finite(z)).w).normalized();
        if (la.chart == ra.chart) CHECK(std::abs(la.z - ra.z) < 1e-9 * std::max(1.0, std::abs(ra.z)));
      }
    }
  }

  TEST_CASE("infinity: repelling 4/3 for Newton, superattracting fixed point for antipodal") {
    auto e = evaluate(Parameter::newton({0.3, 2.5}), SpherePoint::infinity());
    CHECK(e.w.is_infinity());
    CHECK(std::abs(e.dw - 4.0 / 3.0) < 1e-12);
    auto ea = evaluate(Parameter::antipodal({1.0, 2.0}), SpherePoint::infinity());
    CHECK(ea.w.is_infinity());
    CHECK(std::abs(ea.dw) < 1e-12);
  }

  TEST_CASE("chart switch is continuous") {
    auto p = Parameter::newton({0.5, 3.0});
    cplx z(3e8, 2e8);
    auto fin = evaluate(p, SpherePoint::finite(z));
    auto inf = evaluate(p, SpherePoint{Chart::Infinity, 1.0 / z});
    auto a = fin.w.normalized(), b = inf.w.normalized();
    REQUIRE(a.chart == b.chart);
    CHECK(std::abs(a.z - b.z) < 1e-12 * std::abs(a.z));
  }

  TEST_CASE("wire format for complex numbers") {
    CHECK(parse_complex("1.5,-2") == cplx(1.5, -2));
    CHECK(parse_complex(format_complex({0.1, 1.0 / 3.0})) == cplx(0.1, 1.0 / 3.0));
    CHECK_THROWS_AS(parse_complex("abc"), Error);
    CHECK_THROWS_AS(parse_complex("1,"), Error);
    CHECK_THROWS_AS(parse_complex("nan,0"), Error);
    CHECK_THROWS_AS(evaluate(Parameter::newton({NAN, 1.0}), SpherePoint::finite(0.0)), Error);
  }
}
