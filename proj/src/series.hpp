#pragma once

#include <vector>

#include "atlas/core.hpp"

namespace atlas {

// Truncated power series with a fixed number of coefficients.
struct Series {
  std::vector<cplx> c;

  explicit Series(size_t n = 0, cplx v = 0.0) : c(n, 0.0) {
    if (n) c[0] = v;
  }
  size_t size() const { return c.size(); }
  cplx& operator[](size_t i) { return c[i]; }
  cplx operator[](size_t i) const { return c[i]; }

  static Series variable(size_t n, cplx at) {
    Series s(n, at);
    if (n > 1) s.c[1] = 1.0;
    return s;
  }
};

inline Series operator+(Series a, const Series& b) {
  for (size_t i = 0; i < a.size(); ++i) a.c[i] += b.c[i];
  return a;
}
inline Series operator-(Series a, const Series& b) {
  for (size_t i = 0; i < a.size(); ++i) a.c[i] -= b.c[i];
  return a;
}
inline Series operator+(Series a, cplx v) {
  a.c[0] += v;
  return a;
}
inline Series operator-(Series a, cplx v) {
  a.c[0] -= v;
  return a;
}
inline Series operator*(Series a, cplx v) {
  for (auto& x : a.c) x *= v;
  return a;
}
inline Series operator*(cplx v, Series a) { return a * v; }

inline Series operator*(const Series& a, const Series& b) {
  size_t n = a.size();
  Series r(n);
  for (size_t i = 0; i < n; ++i) {
    if (a.c[i] == 0.0) continue;
    for (size_t j = 0; i + j < n; ++j) r.c[i + j] += a.c[i] * b.c[j];
  }
  return r;
}

inline Series reciprocal(const Series& a) {
  size_t n = a.size();
  Series r(n);
  r.c[0] = 1.0 / a.c[0];
  for (size_t k = 1; k < n; ++k) {
    cplx s = 0.0;
    for (size_t j = 1; j <= k; ++j) s += a.c[j] * r.c[k - j];
    r.c[k] = -s * r.c[0];
  }
  return r;
}

inline Series operator/(const Series& a, const Series& b) {
  return a * reciprocal(b);
}

// log of a series with constant term 1.
inline Series log1(const Series& a) {
  size_t n = a.size();
  Series d(n), r(n);
  for (size_t k = 1; k < n; ++k) d.c[k - 1] = double(k) * a.c[k];
  Series q = d * reciprocal(a);
  for (size_t k = 1; k < n; ++k) r.c[k] = q.c[k - 1] / double(k);
  return r;
}

inline Series power(const Series& a, int k) {
  Series r(a.size(), 1.0);
  for (int i = 0; i < k; ++i) r = r * a;
  return r;
}

}  // namespace atlas
