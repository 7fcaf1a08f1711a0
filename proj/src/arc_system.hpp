#pragma once

#include <Eigen/Dense>

#include "atlas/family.hpp"

namespace atlas {

// Parabolic-arc equations in (z, a): the half-return fixes z and the
// holomorphic return map has multiplier of modulus 1 there.
struct ArcSystem {
  Family family;
  int half;

  Eigen::Vector3d residual(cplx z, cplx a) const {
    Map f(Parameter::make(family, a));
    cplx d1, d2;
    cplx g = f.iterate(z, half, &d1);
    cplx s = f.inv(g);
    f.iterate(g, half, &d2);
    double mu = std::abs(d1 * d2);
    return {s.real() - z.real(), s.imag() - z.imag(), mu - 1.0};
  }
};

std::vector<cplx> return_jet(const Parameter& p, cplx z1, int maps, int order);

}  // namespace atlas
