#include <cmath>

#include "atlas/parabolic.hpp"
#include "common.hpp"
#include "doctest.h"

using namespace atlas;
using testing_support::kA2;
using testing_support::kTongue;

TEST_SUITE("parabolic") {
  TEST_CASE("boundary datum of the tongue is a simple parabolic point") {
    auto d = find_boundary_parabolic(Parameter::antipodal(kTongue), cplx(1.0, 0.0), 2);
    CHECK(d.period == 2);
    CHECK(d.petal_kind == PetalKind::Simple);
    CHECK(d.multiplier_residual < 1e-10);
    // independent: the return map fixes the point with derivative 1
    Map f(d.param);
    cplx der;
    cplx w = f.iterate(d.parabolic_point, 2, &der);
    CHECK(std::abs(w - d.parabolic_point) < 1e-9);
    CHECK(std::abs(der - 1.0) < 1e-7);
  }

  TEST_CASE("Fatou coordinate conjugates the return map to translation") {
    auto d = find_boundary_parabolic(Parameter::antipodal(kTongue), cplx(0.0, -1.0), 2);
    auto co = d.coordinate();
    for (double ang : {-0.5, 0.0, 0.5}) {
      cplx z = co.z1 - 1.0 / (co.A * (3.0 * co.u_min * std::polar(1.0, ang)));
      cplx p0 = attracting_fatou_coordinate(d, z).psi;
      cplx p1 = attracting_fatou_coordinate(d, d.ret(z)).psi;
      CHECK(std::abs(p1 - p0 - 1.0) < 1e-6);
    }
    CHECK(std::abs(d.norm.beta.real() - 0.5) < 1e-6);
  }

  TEST_CASE("critical heights are opposite") {
    auto d = find_boundary_parabolic(Parameter::newton(kA2), std::polar(1.0, M_PI / 6), 4);
    double hp = critical_ecalle_height(d, CriticalChoice::Plus).h;
    double hm = critical_ecalle_height(d, CriticalChoice::Minus).h;
    CHECK(std::abs(hp + hm) < 1e-6);
    CHECK(std::abs(critical_ecalle_height(d, CriticalChoice::Plus, 2.0).h - hp) < 1e-6);
  }

  TEST_CASE("tracing an antipodal arc hits its targets") {
    auto d = find_boundary_parabolic(Parameter::antipodal(kTongue), cplx(0.0, -1.0), 2);
    std::vector<double> targets{-1.0, 0.25, 1.5};
    auto tr = trace_arc(d, targets);
    REQUIRE(tr.data.size() == 3);
    for (size_t i = 0; i < 3; ++i) {
      CHECK(std::abs(tr.samples[i].h - targets[i]) < 1e-8);
      CHECK(std::abs(critical_ecalle_height(tr.data[i]).h - targets[i]) < 1e-6);
      CHECK(tr.samples[i].multiplier_residual < 1e-10);
    }
  }

  TEST_CASE("points between two arc samples lie on the arc") {
    auto d = find_boundary_parabolic(Parameter::newton(kA2), std::polar(1.0, M_PI / 3), 4);
    auto tr = trace_arc(d, {-0.5, 0.5});
    REQUIRE(tr.data.size() == 2);
    auto mid = arc_point_between(tr.data[0], tr.data[1], 0.5);
    REQUIRE(mid.has_value());
    CHECK(mid->multiplier_residual < 1e-9);
    double h = critical_ecalle_height(*mid).h;
    CHECK(h > -0.5);
    CHECK(h < 0.5);
    auto other = find_boundary_parabolic(Parameter::antipodal(kTongue), 1.0, 2);
    CHECK_THROWS_AS(arc_point_between(tr.data[0], other, 0.5), Error);
  }

  TEST_CASE("lifted phase decreases toward an antipodal arc") {
    auto d = find_boundary_parabolic(Parameter::antipodal(kTongue), cplx(0.0, -1.0), 2);
    cplx n = arc_normal(d);
    CHECK(std::abs(std::abs(n) - 1.0) < 1e-12);
    double prev = INFINITY;
    for (double t : {1e-3, 1e-4, 1e-5}) {
      auto ph = repelling_fatou_and_phase(d.param.value + t * n, d);
      CHECK(ph.lifted_phase < prev);
      CHECK(std::abs(ph.transit_height - ph.incoming_height) < 1e-4);
      prev = ph.lifted_phase;
    }
  }

  TEST_CASE("boundary search rejects parameters outside U") {
    CHECK_THROWS_AS(find_boundary_parabolic(Parameter::newton({2.0, 0.0}), 1.0, 4), Error);
  }
}
